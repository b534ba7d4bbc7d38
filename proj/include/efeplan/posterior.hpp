#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/joint_table.hpp"
#include "efeplan/model.hpp"

namespace efeplan {

/// Trajectory-level sizes of a structured posterior.
struct PosteriorShape {
    std::size_t num_policies = 0;
    std::size_t x_size = 0;   // state trajectories
    std::size_t y_size = 0;   // observation trajectories
    std::size_t num_theta = 0;

    static PosteriorShape of(const GenerativeModel& m) {
        return {m.num_policies(), m.num_x_trajectories(), m.num_y_trajectories(),
                static_cast<std::size_t>(m.num_theta())};
    }
    bool operator==(const PosteriorShape&) const = default;
};

/// Variational posterior q(y, x, theta, u) in factored form:
///   q(u) * q(x|u) * q(y|x) * q(theta|y,x).
/// Storing the factors makes the structural constraint q(y,theta|x,u) =
/// q(y,theta|x) hold by construction. Conditioning slices with zero mass
/// upstream carry an undefined flag and a uniform fill; they may only be
/// consumed where the outer weight is zero.
class StructuredPosterior {
public:
    /// log tables: x_given_u is policy-major [U][Sx], y_given_x is
    /// x-major [Sx][Oy], theta_given_yx is (y,x)-major [Oy*Sx][Th] with
    /// the pair flattened as y * Sx + x.
    static StructuredPosterior from_factors(PosteriorShape shape,
                                            Categorical q_u,
                                            std::vector<double> log_x_given_u,
                                            std::vector<double> log_y_given_x,
                                            std::vector<double> log_theta_given_yx,
                                            std::vector<std::uint8_t> y_slice_defined = {},
                                            std::vector<std::uint8_t> theta_slice_defined = {});

    const PosteriorShape& shape() const { return shape_; }
    const Categorical& q_u() const { return q_u_; }

    double log_q_u(std::size_t u) const { return q_u_.log_prob(u); }
    std::span<const double> x_slice(std::size_t u) const {
        return std::span<const double>(log_x_given_u_).subspan(u * shape_.x_size, shape_.x_size);
    }
    std::span<const double> y_slice(std::size_t x) const {
        return std::span<const double>(log_y_given_x_).subspan(x * shape_.y_size, shape_.y_size);
    }
    std::span<const double> theta_slice(std::size_t y, std::size_t x) const {
        return std::span<const double>(log_theta_given_yx_)
            .subspan((y * shape_.x_size + x) * shape_.num_theta, shape_.num_theta);
    }
    double log_q_x(std::size_t u, std::size_t x) const {
        return log_x_given_u_[u * shape_.x_size + x];
    }
    double log_q_y(std::size_t x, std::size_t y) const {
        return log_y_given_x_[x * shape_.y_size + y];
    }
    double log_q_theta(std::size_t y, std::size_t x, std::size_t t) const {
        return log_theta_given_yx_[(y * shape_.x_size + x) * shape_.num_theta + t];
    }

    bool y_slice_defined(std::size_t x) const {
        return y_defined_.empty() || y_defined_[x] != 0;
    }
    bool theta_slice_defined(std::size_t y, std::size_t x) const {
        return theta_defined_.empty() || theta_defined_[y * shape_.x_size + x] != 0;
    }

    /// Copy with a replaced policy marginal (same conditional factors).
    StructuredPosterior with_policy_marginal(Categorical q_u) const;

    /// Dense composition over axes (y, x, theta, u), for small shapes.
    JointTable compose_joint() const;

    /// The stored factors as ConditionalTable views (copies).
    ConditionalTable x_given_u_table() const;
    ConditionalTable y_given_x_table() const;
    ConditionalTable theta_given_yx_table() const;

private:
    StructuredPosterior() = default;
    void validate() const;

    PosteriorShape shape_;
    Categorical q_u_ = Categorical::uniform(1);
    std::vector<double> log_x_given_u_;
    std::vector<double> log_y_given_x_;
    std::vector<double> log_theta_given_yx_;
    std::vector<std::uint8_t> y_defined_;
    std::vector<std::uint8_t> theta_defined_;
};

/// Extracts the exact posterior of the model: q(u) = p(u), q(x|u) = p(x|u),
/// and the emission-side conditionals from the policy-prior mixture. For
/// models whose (state, theta) belief factorizes, the composition equals
/// p(y,x,theta|u) for every policy and the complexity term vanishes.
StructuredPosterior exact_posterior(const GenerativeModel& model);

/// Seeded random posterior: every factor slice is a symmetric Dirichlet(1)
/// draw. Deterministic in the seed.
StructuredPosterior random_posterior(const PosteriorShape& shape, std::uint64_t seed);

enum class DerivedConditional {
    theta_given_x,
    x_given_u,
    y_given_x,
    theta_given_yx,
    yx_given_u,
};

/// Exact marginalization/conditioning of the composed posterior.
ConditionalTable derived_conditional(const StructuredPosterior& post,
                                     DerivedConditional kind);

} // namespace efeplan
