#pragma once

#include <span>
#include <string>
#include <vector>

#include "efeplan/categorical.hpp"
#include "efeplan/joint_table.hpp"

namespace efeplan {

/// Shannon entropy in nats of a normalized log-probability vector,
/// with 0 log 0 = 0.
double entropy_from_logs(std::span<const double> log_probs);

/// H[q(target | given)] for every given-assignment, indexed by the
/// conditional's flattened given axes. Undefined slices yield 0 entries.
std::vector<double> entropy_given(const ConditionalTable& cond);

/// Scalar conditional entropy: the entropy of the targets averaged over
/// the marginal of the given axes.
double conditional_entropy(const JointTable& joint,
                           const std::vector<std::string>& target,
                           const std::vector<std::string>& given);

/// KL divergence D[p || q] in nats between equal-support log-prob vectors.
/// Throws DivergenceUndefinedError when p puts mass where q has none.
double kl_divergence_from_logs(std::span<const double> p_logs,
                               std::span<const double> q_logs);

double kl_divergence(const Categorical& p, const Categorical& q);

/// Mutual information I[a ; b | given] in nats, computed as the expectation
/// over (a, given) of the divergence between q(b|a,given) and q(b|given).
double mutual_information(const JointTable& joint,
                          const std::string& axis_a,
                          const std::string& axis_b,
                          const std::vector<std::string>& given = {});

/// Normalized exponential with max-subtraction. Invariant to adding a
/// constant to every score. Throws EmptyInputError on an empty vector.
Categorical softmax(std::span<const double> scores);

} // namespace efeplan
