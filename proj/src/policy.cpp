#include "asymreg/policy.hpp"

#include <algorithm>
#include <cmath>

namespace asymreg {

namespace {
std::atomic<std::uint64_t> g_fallbacks{0};
}

std::uint64_t mask_fallback_count() { return g_fallbacks.load(std::memory_order_relaxed); }

PolicyDistribution mask_distribution(const RuleProbs& raw, const RuleMask& mask) {
  PolicyDistribution d;
  d.raw = raw;
  double total = 0;
  for (std::size_t i = 0; i < kNumRules; ++i) {
    double v = raw[i];
    if (!mask[i] || !std::isfinite(v) || v <= 0) v = 0;
    d.masked[i] = v;
    total += v;
  }
  if (total > 0 && std::isfinite(total)) {
    for (double& v : d.masked) v /= total;
    return d;
  }
  d.fallback = true;
  g_fallbacks.fetch_add(1, std::memory_order_relaxed);
  auto valid = static_cast<double>(std::count(mask.begin(), mask.end(), true));
  for (std::size_t i = 0; i < kNumRules; ++i) d.masked[i] = mask[i] ? 1.0 / valid : 0.0;
  return d;
}

PolicyDistribution RandomPolicy::next_distribution(const DerivationState& state, const Condition&) {
  RuleProbs raw;
  raw.fill(1.0);
  return mask_distribution(raw, valid_next_mask(state));
}

std::unique_ptr<Policy> random_policy() { return std::make_unique<RandomPolicy>(); }

TeacherPolicy::TeacherPolicy(RuleSeq target_rules) : target_(std::move(target_rules)) {}

PolicyDistribution TeacherPolicy::next_distribution(const DerivationState& state, const Condition&) {
  const auto& rules = state.rules();
  RuleProbs raw{};
  if (rules.size() < target_.size() && std::equal(rules.begin(), rules.end(), target_.begin())) {
    raw[static_cast<std::size_t>(target_[rules.size()])] = 1.0;
  } else {
    raw.fill(1.0);
  }
  return mask_distribution(raw, valid_next_mask(state));
}

}  // namespace asymreg
