#include "efeplan/joint_table.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace efeplan {

namespace {

std::size_t axes_size(const std::vector<Axis>& axes) {
    std::size_t n = 1;
    for (const Axis& a : axes) n *= a.size;
    return n;
}

void check_axes(const std::vector<Axis>& axes) {
    std::unordered_set<std::string> seen;
    for (const Axis& a : axes) {
        if (a.size == 0) throw AxisError("axis '" + a.name + "' has size 0");
        if (!seen.insert(a.name).second)
            throw AxisError("duplicate axis name '" + a.name + "'");
    }
}

} // namespace

JointTable JointTable::from_log_probs(std::vector<Axis> axes,
                                      std::vector<double> log_probs) {
    JointTable t;
    t.axes_ = std::move(axes);
    t.log_probs_ = std::move(log_probs);
    check_axes(t.axes_);
    if (axes_size(t.axes_) != t.log_probs_.size())
        throw AxisError("JointTable: table size does not match axis sizes");
    t.strides_.assign(t.axes_.size(), 1);
    for (std::size_t i = t.axes_.size(); i-- > 1;)
        t.strides_[i - 1] = t.strides_[i] * t.axes_[i].size;
    t.validate();
    return t;
}

JointTable JointTable::from_probs(std::vector<Axis> axes,
                                  std::span<const double> probs) {
    return from_log_probs(std::move(axes), logs_from_probs(probs));
}

void JointTable::validate() const {
    for (double lp : log_probs_)
        if (std::isnan(lp) || lp > 1e-12)
            throw Error("JointTable: entry out of range");
    double mass = std::exp(log_mass());
    if (std::fabs(mass - 1.0) > 1e-12)
        throw Error("JointTable: total mass " + std::to_string(mass) +
                    " deviates from 1 beyond tolerance");
}

std::size_t JointTable::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    throw AxisError("unknown axis '" + name + "'");
}

std::size_t JointTable::flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != axes_.size())
        throw AxisError("JointTable: index rank mismatch");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= axes_[i].size)
            throw AxisError("JointTable: index out of range on axis '" + axes_[i].name + "'");
        flat += idx[i] * strides_[i];
    }
    return flat;
}

void JointTable::unflatten(std::size_t flat, std::span<std::size_t> out) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        out[i] = flat / strides_[i];
        flat %= strides_[i];
    }
}

JointTable JointTable::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> keep_idx;
    keep_idx.reserve(keep.size());
    for (const std::string& name : keep) keep_idx.push_back(axis_index(name));

    std::vector<Axis> out_axes;
    out_axes.reserve(keep.size());
    for (std::size_t i : keep_idx) out_axes.push_back(axes_[i]);

    std::vector<std::size_t> out_strides(keep_idx.size(), 1);
    for (std::size_t i = keep_idx.size(); i-- > 1;)
        out_strides[i - 1] = out_strides[i] * out_axes[i].size;

    const std::size_t out_size = axes_size(out_axes);

    // Map each input cell to its output cell, then reduce per output cell
    // with a two-pass log-sum-exp for stability.
    std::vector<std::size_t> cell_of(log_probs_.size());
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t f = 0; f < log_probs_.size(); ++f) {
        unflatten(f, idx);
        std::size_t o = 0;
        for (std::size_t k = 0; k < keep_idx.size(); ++k)
            o += idx[keep_idx[k]] * out_strides[k];
        cell_of[f] = o;
    }
    std::vector<double> maxv(out_size, kNegInf);
    for (std::size_t f = 0; f < log_probs_.size(); ++f)
        maxv[cell_of[f]] = std::max(maxv[cell_of[f]], log_probs_[f]);
    std::vector<double> acc(out_size, 0.0);
    for (std::size_t f = 0; f < log_probs_.size(); ++f) {
        double m = maxv[cell_of[f]];
        if (m != kNegInf) acc[cell_of[f]] += std::exp(log_probs_[f] - m);
    }
    std::vector<double> out(out_size);
    for (std::size_t o = 0; o < out_size; ++o)
        out[o] = maxv[o] == kNegInf ? kNegInf : maxv[o] + std::log(acc[o]);
    return from_log_probs(std::move(out_axes), std::move(out));
}

Categorical JointTable::marginal_categorical(const std::string& name) const {
    JointTable m = marginal({name});
    return Categorical::from_log_probs(
        std::vector<double>(m.log_probs().begin(), m.log_probs().end()));
}

ConditionalTable JointTable::conditional(const std::vector<std::string>& target,
                                         const std::vector<std::string>& given) const {
    std::vector<std::string> all = given;
    all.insert(all.end(), target.begin(), target.end());
    JointTable joint = marginal(all);  // given-major ordering

    std::vector<Axis> gaxes, taxes;
    for (const std::string& n : given) gaxes.push_back(joint.axis(n));
    for (const std::string& n : target) taxes.push_back(joint.axis(n));

    const std::size_t tsize = axes_size(taxes);
    const std::size_t gsize = axes_size(gaxes);

    std::vector<double> logp(joint.log_probs().begin(), joint.log_probs().end());
    std::vector<std::uint8_t> defined(gsize, 1);
    for (std::size_t g = 0; g < gsize; ++g) {
        std::span<double> slice(logp.data() + g * tsize, tsize);
        double lm = log_sum_exp(slice);
        if (lm == kNegInf) {
            defined[g] = 0;
            double u = -std::log(static_cast<double>(tsize));
            for (double& x : slice) x = u;
        } else {
            for (double& x : slice) x -= lm;
        }
    }
    return ConditionalTable::from_log_probs(std::move(taxes), std::move(gaxes),
                                            std::move(logp), std::move(defined));
}

ConditionalTable ConditionalTable::from_log_probs(std::vector<Axis> target_axes,
                                                  std::vector<Axis> given_axes,
                                                  std::vector<double> log_probs,
                                                  std::vector<std::uint8_t> defined) {
    ConditionalTable c;
    c.target_axes_ = std::move(target_axes);
    c.given_axes_ = std::move(given_axes);
    c.log_probs_ = std::move(log_probs);
    c.defined_ = std::move(defined);
    check_axes(c.target_axes_);
    std::vector<Axis> all = c.given_axes_;
    all.insert(all.end(), c.target_axes_.begin(), c.target_axes_.end());
    check_axes(all);
    c.target_size_ = axes_size(c.target_axes_);
    c.given_size_ = axes_size(c.given_axes_);
    if (c.log_probs_.size() != c.target_size_ * c.given_size_)
        throw AxisError("ConditionalTable: table size does not match axes");
    if (!c.defined_.empty() && c.defined_.size() != c.given_size_)
        throw AxisError("ConditionalTable: defined mask size mismatch");
    c.validate();
    return c;
}

ConditionalTable ConditionalTable::from_probs(std::vector<Axis> target_axes,
                                              std::vector<Axis> given_axes,
                                              std::span<const double> probs) {
    return from_log_probs(std::move(target_axes), std::move(given_axes),
                          logs_from_probs(probs));
}

bool ConditionalTable::all_defined() const {
    if (defined_.empty()) return true;
    return std::all_of(defined_.begin(), defined_.end(),
                       [](std::uint8_t d) { return d != 0; });
}

void ConditionalTable::validate() const {
    for (double lp : log_probs_)
        if (std::isnan(lp) || lp > 1e-12)
            throw Error("ConditionalTable: entry out of range");
    for (std::size_t g = 0; g < given_size_; ++g) {
        if (!slice_defined(g)) continue;
        double mass = std::exp(log_sum_exp(slice(g)));
        if (std::fabs(mass - 1.0) > 1e-12)
            throw Error("ConditionalTable: slice " + std::to_string(g) +
                        " mass deviates from 1 beyond tolerance");
    }
}

} // namespace efeplan
