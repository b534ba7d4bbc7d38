#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace efeplan {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Tolerance for algebraic identities on small tables.
inline constexpr double kTolAlgebraic = 1e-12;
/// Tolerance for decomposition residuals accumulated over larger tables.
inline constexpr double kTolTheorem = 1e-9;
/// Tolerance for agreement between the main path and the brute-force
/// reference path.
inline constexpr double kTolOracle = 1e-10;

/// Stable log(sum(exp(v))). Returns -inf for empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v)
        if (x > m) m = x;
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// p * log(p) with the 0 * log(0) = 0 convention, taking log p as input.
inline double xlogx_from_log(double logp) {
    return logp == kNegInf ? 0.0 : std::exp(logp) * logp;
}

/// exp(logp) with exact zero for -inf.
inline double prob_from_log(double logp) {
    return logp == kNegInf ? 0.0 : std::exp(logp);
}

/// log of a linear-domain probability, mapping 0 to -inf exactly.
inline double log_from_prob(double p) {
    return p <= 0.0 ? kNegInf : std::log(p);
}

inline std::vector<double> logs_from_probs(std::span<const double> p) {
    std::vector<double> out(p.size());
    for (size_t i = 0; i < p.size(); ++i) out[i] = log_from_prob(p[i]);
    return out;
}

inline std::vector<double> probs_from_logs(std::span<const double> lp) {
    std::vector<double> out(lp.size());
    for (size_t i = 0; i < lp.size(); ++i) out[i] = prob_from_log(lp[i]);
    return out;
}

/// n^k for small table-shape arithmetic; throws on overflow via double check.
inline long long ipow(long long n, int k) {
    long long r = 1;
    for (int i = 0; i < k; ++i) r *= n;
    return r;
}

} // namespace efeplan
