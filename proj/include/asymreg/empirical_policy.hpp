#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "asymreg/policy.hpp"

namespace asymreg {

/// Which empirical baseline to build: full or limited history (last l rules),
/// with or without keying on the desired condition.
struct EmpiricalVariant {
  bool conditioned = true;
  std::optional<std::size_t> history;  // nullopt = full history

  /// "fh", "fhnc", "lh:8", "lhnc:8" (also "lh(8)").
  static EmpiricalVariant parse(std::string_view text);
  std::string name() const;
};

/// What an empirical policy does on a context never seen in training.
enum class UnseenContext {
  uniform,  // uniform over valid rules
  abstain,  // uniform over valid rules, flagged so generation stops
};

struct TrainingSequence {
  RuleSeq rules;
  Condition condition;
};

/// Next-rule counts for every (context, condition) transition in a corpus.
class EmpiricalIndex {
 public:
  using Counts = std::array<std::uint64_t, kNumRules>;

  EmpiricalIndex(std::span<const TrainingSequence> corpus, EmpiricalVariant variant);

  const EmpiricalVariant& variant() const { return variant_; }
  /// nullptr when the context was never observed.
  const Counts* lookup(std::span<const Rule> prefix, const Condition& condition) const;
  std::size_t contexts() const { return counts_.size(); }

 private:
  std::string key(std::span<const Rule> prefix, const Condition& condition) const;

  EmpiricalVariant variant_;
  std::unordered_map<std::string, Counts> counts_;
};

class EmpiricalPolicy final : public Policy {
 public:
  EmpiricalPolicy(std::shared_ptr<const EmpiricalIndex> index, UnseenContext unseen);
  PolicyDistribution next_distribution(const DerivationState& state, const Condition& condition) override;
  std::string name() const override { return index_->variant().name(); }

 private:
  std::shared_ptr<const EmpiricalIndex> index_;
  UnseenContext unseen_;
};

std::unique_ptr<Policy> build_empirical(std::span<const TrainingSequence> corpus, EmpiricalVariant variant,
                                        UnseenContext unseen = UnseenContext::uniform);

}  // namespace asymreg
