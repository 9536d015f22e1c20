#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "asymreg/grammar.hpp"
#include "asymreg/policy.hpp"

namespace asymreg {

/// Outcome of sequential sampling: a complete tree, or the partial derivation
/// left when the length limit was hit or the policy abstained.
struct Sample {
  DerivationState state;
  std::optional<ExprTree> tree;

  bool complete() const { return tree.has_value(); }
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw, so
/// results do not depend on the standard library's distribution code.
double unit_draw(std::mt19937_64& rng);

/// Index drawn from a probability vector by inverse CDF.
std::size_t draw_rule(const RuleProbs& probs, std::mt19937_64& rng);

/// Continues `start` by sampling from the masked policy output until the
/// derivation completes or reaches its length limit.
Sample sample_from_state(Policy& policy, const Condition& condition, DerivationState start, std::mt19937_64& rng);

Sample sample_expression(Policy& policy, const Condition& condition, std::size_t length_limit,
                         std::uint64_t seed);

struct Completion {
  std::string expression;  // rendered text, or the rule ids of an incomplete sample
  bool complete = true;
  double frequency = 0;
};

/// n completions of `prefix`, aggregated by text and sorted by decreasing
/// frequency (ties by text).
std::vector<Completion> sample_from_prefix(Policy& policy, const RuleSeq& prefix, const Condition& condition,
                                           std::size_t n, std::uint64_t seed,
                                           std::size_t length_limit = kDefaultLengthLimit);

}  // namespace asymreg
