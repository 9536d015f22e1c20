#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "asymreg/grammar.hpp"
#include "asymreg/rational.hpp"

namespace asymreg {

using RuleProbs = std::array<double, kNumRules>;

/// Next-rule distribution before and after grammatical masking.
struct PolicyDistribution {
  RuleProbs raw{};
  RuleProbs masked{};
  /// raw had no mass on any valid rule; masked is uniform over the mask.
  bool fallback = false;
  /// The policy has no information for this state (an empirical policy with an
  /// unseen context in abstaining mode). masked is still uniform over the mask
  /// so that search can continue; generation stops here.
  bool abstained = false;
};

/// masked = normalize(raw * mask), or uniform over the mask when that product
/// is all zero. Negative or non-finite raw entries count as zero.
PolicyDistribution mask_distribution(const RuleProbs& raw, const RuleMask& mask);

/// Process-wide count of mask_distribution calls that hit the all-zero fallback.
std::uint64_t mask_fallback_count();

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p(next rule | partial derivation, desired condition).
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyDistribution next_distribution(const DerivationState& state, const Condition& condition) = 0;
  virtual std::string name() const = 0;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// Uniform over grammatically valid next rules.
class RandomPolicy final : public Policy {
 public:
  PolicyDistribution next_distribution(const DerivationState& state, const Condition& condition) override;
  std::string name() const override { return "random"; }
};

std::unique_ptr<Policy> random_policy();

/// Diagnostic prior: all mass on the target's own next rule while the partial
/// derivation is still a prefix of the target's rule sequence, uniform elsewhere.
class TeacherPolicy final : public Policy {
 public:
  explicit TeacherPolicy(RuleSeq target_rules);
  PolicyDistribution next_distribution(const DerivationState& state, const Condition& condition) override;
  std::string name() const override { return "teacher"; }

 private:
  RuleSeq target_;
};

/// Fails on every query; used to exercise error paths.
class FailingPolicy final : public Policy {
 public:
  PolicyDistribution next_distribution(const DerivationState&, const Condition&) override {
    throw PolicyError("policy failure");
  }
  std::string name() const override { return "failing"; }
};

}  // namespace asymreg
