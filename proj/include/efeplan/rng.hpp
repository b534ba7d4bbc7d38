#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace efeplan {

/// Deterministic random source. Wraps mt19937_64 but derives all variates
/// from raw 64-bit draws so that streams are identical across standard
/// library implementations (std::uniform_real_distribution is not
/// bit-portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection-free modulo is fine at desk scale; bias < 2^-53 for
        // the small n used here.
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

    /// Exponential(1) variate.
    double exp1() {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return -std::log(u);
    }

    /// Fills out with a symmetric Dirichlet(1) sample (a uniform point on
    /// the simplex), in the linear domain.
    void dirichlet1(std::span<double> out) {
        double total = 0.0;
        for (double& x : out) {
            x = exp1();
            total += x;
        }
        for (double& x : out) x /= total;
    }

    /// Samples an index from linear-domain weights (need not be normalized).
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace efeplan
