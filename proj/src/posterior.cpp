#include "efeplan/posterior.hpp"

#include <cmath>

#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"
#include "efeplan/rng.hpp"

namespace efeplan {

StructuredPosterior StructuredPosterior::from_factors(
    PosteriorShape shape, Categorical q_u, std::vector<double> log_x_given_u,
    std::vector<double> log_y_given_x, std::vector<double> log_theta_given_yx,
    std::vector<std::uint8_t> y_slice_defined,
    std::vector<std::uint8_t> theta_slice_defined) {
    StructuredPosterior p;
    p.shape_ = shape;
    p.q_u_ = std::move(q_u);
    p.log_x_given_u_ = std::move(log_x_given_u);
    p.log_y_given_x_ = std::move(log_y_given_x);
    p.log_theta_given_yx_ = std::move(log_theta_given_yx);
    p.y_defined_ = std::move(y_slice_defined);
    p.theta_defined_ = std::move(theta_slice_defined);
    p.validate();
    return p;
}

void StructuredPosterior::validate() const {
    if (q_u_.size() != shape_.num_policies)
        throw AxisError("StructuredPosterior: q(u) size mismatch");
    if (log_x_given_u_.size() != shape_.num_policies * shape_.x_size)
        throw AxisError("StructuredPosterior: q(x|u) size mismatch");
    if (log_y_given_x_.size() != shape_.x_size * shape_.y_size)
        throw AxisError("StructuredPosterior: q(y|x) size mismatch");
    if (log_theta_given_yx_.size() != shape_.y_size * shape_.x_size * shape_.num_theta)
        throw AxisError("StructuredPosterior: q(theta|y,x) size mismatch");
    if (!y_defined_.empty() && y_defined_.size() != shape_.x_size)
        throw AxisError("StructuredPosterior: y mask size mismatch");
    if (!theta_defined_.empty() &&
        theta_defined_.size() != shape_.y_size * shape_.x_size)
        throw AxisError("StructuredPosterior: theta mask size mismatch");

    for (std::size_t u = 0; u < shape_.num_policies; ++u) {
        double m = std::exp(log_sum_exp(x_slice(u)));
        if (std::fabs(m - 1.0) > 1e-12)
            throw Error("StructuredPosterior: q(x|u) slice not normalized");
    }
    for (std::size_t x = 0; x < shape_.x_size; ++x) {
        double m = std::exp(log_sum_exp(y_slice(x)));
        if (std::fabs(m - 1.0) > 1e-12)
            throw Error("StructuredPosterior: q(y|x) slice not normalized");
    }
    for (std::size_t y = 0; y < shape_.y_size; ++y)
        for (std::size_t x = 0; x < shape_.x_size; ++x) {
            double m = std::exp(log_sum_exp(theta_slice(y, x)));
            if (std::fabs(m - 1.0) > 1e-12)
                throw Error("StructuredPosterior: q(theta|y,x) slice not normalized");
        }
}

StructuredPosterior StructuredPosterior::with_policy_marginal(Categorical q_u) const {
    if (q_u.size() != shape_.num_policies)
        throw AxisError("with_policy_marginal: size mismatch");
    StructuredPosterior copy = *this;
    copy.q_u_ = std::move(q_u);
    return copy;
}

JointTable StructuredPosterior::compose_joint() const {
    const std::size_t U = shape_.num_policies, Sx = shape_.x_size, Oy = shape_.y_size,
                      Th = shape_.num_theta;
    std::vector<double> logp(Oy * Sx * Th * U, kNegInf);
    for (std::size_t y = 0; y < Oy; ++y)
        for (std::size_t x = 0; x < Sx; ++x)
            for (std::size_t t = 0; t < Th; ++t)
                for (std::size_t u = 0; u < U; ++u) {
                    double lp = log_q_u(u) + log_q_x(u, x) + log_q_y(x, y) +
                                log_q_theta(y, x, t);
                    logp[((y * Sx + x) * Th + t) * U + u] = lp;
                }
    return JointTable::from_log_probs(
        {Axis{"y", Oy}, Axis{"x", Sx}, Axis{"theta", Th}, Axis{"u", U}}, std::move(logp));
}

ConditionalTable StructuredPosterior::x_given_u_table() const {
    return ConditionalTable::from_log_probs({Axis{"x", shape_.x_size}},
                                            {Axis{"u", shape_.num_policies}},
                                            log_x_given_u_);
}

ConditionalTable StructuredPosterior::y_given_x_table() const {
    return ConditionalTable::from_log_probs({Axis{"y", shape_.y_size}},
                                            {Axis{"x", shape_.x_size}}, log_y_given_x_,
                                            y_defined_);
}

ConditionalTable StructuredPosterior::theta_given_yx_table() const {
    return ConditionalTable::from_log_probs(
        {Axis{"theta", shape_.num_theta}},
        {Axis{"y", shape_.y_size}, Axis{"x", shape_.x_size}}, log_theta_given_yx_,
        theta_defined_);
}

namespace {

void renormalize_rows(std::vector<double>& logp, std::size_t row_len) {
    for (std::size_t r = 0; r * row_len < logp.size(); ++r) {
        std::span<double> row(logp.data() + r * row_len, row_len);
        double lm = log_sum_exp(row);
        if (lm == kNegInf) continue;
        for (double& v : row) v -= lm;
    }
}

} // namespace

StructuredPosterior exact_posterior(const GenerativeModel& model) {
    const PosteriorShape shape = PosteriorShape::of(model);
    const std::size_t U = shape.num_policies, Sx = shape.x_size, Oy = shape.y_size,
                      Th = shape.num_theta;

    // q(x|u) = p(x|u) and the mixture m(x,theta) = sum_u p(u) p(x,theta|u).
    std::vector<double> log_x_given_u(U * Sx, kNegInf);
    std::vector<double> log_m(Sx * Th, kNegInf);
    {
        std::vector<double> acc(Th);
        for (std::size_t u = 0; u < U; ++u) {
            std::vector<double> xt = model.log_state_theta_given_policy(model.policies()[u]);
            for (std::size_t x = 0; x < Sx; ++x) {
                for (std::size_t t = 0; t < Th; ++t) {
                    double lp = xt[x * Th + t];
                    acc[t] = lp;
                    double& m = log_m[x * Th + t];
                    m = log_sum_exp2(m, model.log_policy_prior(u) + lp);
                }
                log_x_given_u[u * Sx + x] = log_sum_exp(acc);
            }
        }
    }
    renormalize_rows(log_x_given_u, Sx);

    // p(theta|x) from the mixture; trajectories unreachable under every
    // policy fall back to the belief's theta marginal (the emission side is
    // defined pointwise by the likelihood and only ever gets zero weight).
    std::vector<double> log_theta_given_x(Sx * Th);
    Categorical theta_marg = model.theta_prior();
    for (std::size_t x = 0; x < Sx; ++x) {
        std::span<const double> row(log_m.data() + x * Th, Th);
        double lm = log_sum_exp(row);
        for (std::size_t t = 0; t < Th; ++t)
            log_theta_given_x[x * Th + t] =
                lm == kNegInf ? theta_marg.log_prob(t) : row[t] - lm;
    }

    // q(y|x) = sum_theta p(theta|x) lik(y|x,theta); q(theta|y,x) by Bayes.
    std::vector<double> log_y_given_x(Sx * Oy, kNegInf);
    std::vector<double> log_theta_given_yx(Oy * Sx * Th, kNegInf);
    std::vector<std::uint8_t> theta_defined(Oy * Sx, 1);
#pragma omp parallel for schedule(static) if (Sx > 32)
    for (long long xi = 0; xi < static_cast<long long>(Sx); ++xi) {
        const std::size_t x = static_cast<std::size_t>(xi);
        std::vector<double> terms(Th);
        for (std::size_t y = 0; y < Oy; ++y) {
            for (std::size_t t = 0; t < Th; ++t)
                terms[t] = log_theta_given_x[x * Th + t] +
                           model.log_lik_trajectory(y, x, static_cast<int>(t));
            double ly = log_sum_exp(terms);
            log_y_given_x[x * Oy + y] = ly;
            std::size_t base = (y * Sx + x) * Th;
            if (ly == kNegInf) {
                theta_defined[y * Sx + x] = 0;
                double uni = -std::log(static_cast<double>(Th));
                for (std::size_t t = 0; t < Th; ++t) log_theta_given_yx[base + t] = uni;
            } else {
                for (std::size_t t = 0; t < Th; ++t)
                    log_theta_given_yx[base + t] = terms[t] - ly;
            }
        }
    }
    renormalize_rows(log_y_given_x, Oy);

    return StructuredPosterior::from_factors(shape, model.policy_prior(),
                                             std::move(log_x_given_u),
                                             std::move(log_y_given_x),
                                             std::move(log_theta_given_yx), {},
                                             std::move(theta_defined));
}

StructuredPosterior random_posterior(const PosteriorShape& shape, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t U = shape.num_policies, Sx = shape.x_size, Oy = shape.y_size,
                      Th = shape.num_theta;

    auto dirichlet_rows = [&rng](std::size_t rows, std::size_t cols) {
        std::vector<double> linear(rows * cols);
        for (std::size_t r = 0; r < rows; ++r)
            rng.dirichlet1(std::span<double>(linear.data() + r * cols, cols));
        return logs_from_probs(linear);
    };

    std::vector<double> qu_linear(U);
    rng.dirichlet1(qu_linear);
    Categorical q_u = Categorical::from_probs(qu_linear);

    return StructuredPosterior::from_factors(
        shape, std::move(q_u), dirichlet_rows(U, Sx), dirichlet_rows(Sx, Oy),
        dirichlet_rows(Oy * Sx, Th));
}

ConditionalTable derived_conditional(const StructuredPosterior& post,
                                     DerivedConditional kind) {
    const PosteriorShape& s = post.shape();
    switch (kind) {
    case DerivedConditional::x_given_u:
        return post.x_given_u_table();
    case DerivedConditional::y_given_x:
        return post.y_given_x_table();
    case DerivedConditional::theta_given_yx:
        return post.theta_given_yx_table();
    case DerivedConditional::theta_given_x: {
        // q(theta|x) = sum_y q(y|x) q(theta|y,x)
        std::vector<double> logp(s.x_size * s.num_theta, kNegInf);
        std::vector<std::uint8_t> defined(s.x_size, 1);
        std::vector<double> terms(s.y_size);
        for (std::size_t x = 0; x < s.x_size; ++x) {
            if (!post.y_slice_defined(x)) {
                defined[x] = 0;
                double uni = -std::log(static_cast<double>(s.num_theta));
                for (std::size_t t = 0; t < s.num_theta; ++t)
                    logp[x * s.num_theta + t] = uni;
                continue;
            }
            for (std::size_t t = 0; t < s.num_theta; ++t) {
                for (std::size_t y = 0; y < s.y_size; ++y) {
                    double w = post.log_q_y(x, y);
                    terms[y] = w == kNegInf ? kNegInf : w + post.log_q_theta(y, x, t);
                }
                logp[x * s.num_theta + t] = log_sum_exp(terms);
            }
        }
        renormalize_rows(logp, s.num_theta);
        return ConditionalTable::from_log_probs({Axis{"theta", s.num_theta}},
                                                {Axis{"x", s.x_size}}, std::move(logp),
                                                std::move(defined));
    }
    case DerivedConditional::yx_given_u: {
        // q(y,x|u) = q(x|u) q(y|x), flattened (y, x) with y major.
        std::vector<double> logp(s.num_policies * s.y_size * s.x_size, kNegInf);
        for (std::size_t u = 0; u < s.num_policies; ++u)
            for (std::size_t y = 0; y < s.y_size; ++y)
                for (std::size_t x = 0; x < s.x_size; ++x)
                    logp[(u * s.y_size + y) * s.x_size + x] =
                        post.log_q_x(u, x) + post.log_q_y(x, y);
        renormalize_rows(logp, s.y_size * s.x_size);
        return ConditionalTable::from_log_probs(
            {Axis{"y", s.y_size}, Axis{"x", s.x_size}}, {Axis{"u", s.num_policies}},
            std::move(logp));
    }
    }
    throw Error("derived_conditional: unknown kind");
}

} // namespace efeplan
