#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

/// A named dimension of a probability table.
struct Axis {
    std::string name;
    std::size_t size = 0;

    bool operator==(const Axis&) const = default;
};

class ConditionalTable;

/// Dense joint distribution over named axes, log domain, row-major with the
/// last axis fastest. Total mass must be 1 within 1e-12.
class JointTable {
public:
    static JointTable from_log_probs(std::vector<Axis> axes,
                                     std::vector<double> log_probs);
    static JointTable from_probs(std::vector<Axis> axes,
                                 std::span<const double> probs);

    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t rank() const { return axes_.size(); }
    std::size_t size() const { return log_probs_.size(); }
    std::span<const double> log_probs() const { return log_probs_; }

    std::size_t axis_index(const std::string& name) const;
    const Axis& axis(const std::string& name) const { return axes_[axis_index(name)]; }

    std::size_t flat_index(std::span<const std::size_t> idx) const;
    void unflatten(std::size_t flat, std::span<std::size_t> out) const;
    double log_at(std::span<const std::size_t> idx) const {
        return log_probs_[flat_index(idx)];
    }

    /// log of the total mass (0 for a valid table, up to rounding).
    double log_mass() const { return log_sum_exp(log_probs_); }

    /// Marginal onto the named axes, in the requested order.
    JointTable marginal(const std::vector<std::string>& keep) const;

    /// Marginal onto a single axis as a Categorical.
    Categorical marginal_categorical(const std::string& name) const;

    /// Conditional of target given given. Axes outside target+given are
    /// marginalized out first. Zero-mass given-slices are marked undefined
    /// and filled uniformly.
    ConditionalTable conditional(const std::vector<std::string>& target,
                                 const std::vector<std::string>& given) const;

private:
    JointTable() = default;
    void validate() const;

    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::vector<double> log_probs_;
};

/// Conditional distribution p(target | given), log domain. Storage is
/// given-major: entry index = given_flat * target_size + target_flat.
/// Every defined given-slice is normalized over the target axes within
/// 1e-12; undefined slices (zero conditioning mass upstream) are uniform
/// and flagged, and must only be consumed where the outer weight is zero.
class ConditionalTable {
public:
    static ConditionalTable from_log_probs(std::vector<Axis> target_axes,
                                           std::vector<Axis> given_axes,
                                           std::vector<double> log_probs,
                                           std::vector<std::uint8_t> defined = {});
    static ConditionalTable from_probs(std::vector<Axis> target_axes,
                                       std::vector<Axis> given_axes,
                                       std::span<const double> probs);

    const std::vector<Axis>& target_axes() const { return target_axes_; }
    const std::vector<Axis>& given_axes() const { return given_axes_; }

    std::size_t target_size() const { return target_size_; }
    std::size_t given_size() const { return given_size_; }

    std::span<const double> slice(std::size_t given_flat) const {
        return std::span<const double>(log_probs_).subspan(given_flat * target_size_,
                                                           target_size_);
    }
    bool slice_defined(std::size_t given_flat) const {
        return defined_.empty() || defined_[given_flat] != 0;
    }
    bool all_defined() const;

    std::span<const double> log_probs() const { return log_probs_; }

    double log_at(std::size_t given_flat, std::size_t target_flat) const {
        return log_probs_[given_flat * target_size_ + target_flat];
    }

private:
    ConditionalTable() = default;
    void validate() const;

    std::vector<Axis> target_axes_;
    std::vector<Axis> given_axes_;
    std::size_t target_size_ = 0;
    std::size_t given_size_ = 0;
    std::vector<double> log_probs_;
    std::vector<std::uint8_t> defined_;  // empty means all defined
};

} // namespace efeplan
