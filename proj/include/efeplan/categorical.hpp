#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "efeplan/errors.hpp"
#include "efeplan/logspace.hpp"

namespace efeplan {

/// Finite categorical distribution held in the log domain (nats).
///
/// Invariants enforced at construction: exp(log_probs) sums to 1 within
/// 1e-12, each log-probability is <= 0 up to 1e-12 slack, support size >= 1.
class Categorical {
public:
    static Categorical from_log_probs(std::vector<double> log_probs) {
        Categorical c;
        c.log_probs_ = std::move(log_probs);
        c.validate();
        return c;
    }

    static Categorical from_probs(std::span<const double> probs) {
        return from_log_probs(logs_from_probs(probs));
    }

    static Categorical uniform(std::size_t n) {
        if (n == 0) throw EmptyInputError("Categorical::uniform: empty support");
        return from_log_probs(std::vector<double>(n, -std::log(static_cast<double>(n))));
    }

    static Categorical point_mass(std::size_t n, std::size_t at) {
        if (at >= n) throw AxisError("Categorical::point_mass: index out of range");
        std::vector<double> lp(n, kNegInf);
        lp[at] = 0.0;
        return from_log_probs(std::move(lp));
    }

    std::size_t size() const { return log_probs_.size(); }
    double log_prob(std::size_t i) const { return log_probs_[i]; }
    double prob(std::size_t i) const { return prob_from_log(log_probs_[i]); }
    std::span<const double> log_probs() const { return log_probs_; }

    std::vector<double> probs() const { return probs_from_logs(log_probs_); }

    bool operator==(const Categorical& o) const = default;

private:
    Categorical() = default;

    void validate() const {
        if (log_probs_.empty())
            throw EmptyInputError("Categorical: empty support");
        for (std::size_t i = 0; i < log_probs_.size(); ++i) {
            double lp = log_probs_[i];
            if (std::isnan(lp) || lp > 1e-12)
                throw Error("Categorical: log-probability out of range at index " +
                            std::to_string(i));
        }
        double mass = std::exp(log_sum_exp(log_probs_));
        if (std::fabs(mass - 1.0) > 1e-12)
            throw Error("Categorical: mass " + std::to_string(mass) +
                        " deviates from 1 beyond tolerance");
    }

    std::vector<double> log_probs_;
};

} // namespace efeplan
