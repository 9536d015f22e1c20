#include "asymreg/sampling.hpp"

#include <algorithm>
#include <map>

namespace asymreg {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t draw_rule(const RuleProbs& probs, std::mt19937_64& rng) {
  double u = unit_draw(rng);
  double acc = 0;
  std::size_t last_positive = kNumRules;
  for (std::size_t i = 0; i < kNumRules; ++i) {
    if (probs[i] <= 0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  if (last_positive == kNumRules) throw PolicyError("distribution has no mass");
  return last_positive;
}

Sample sample_from_state(Policy& policy, const Condition& condition, DerivationState start, std::mt19937_64& rng) {
  Sample out{std::move(start), std::nullopt};
  while (!out.state.complete() && !out.state.at_limit()) {
    PolicyDistribution d = policy.next_distribution(out.state, condition);
    if (d.abstained) return out;
    out.state.apply(static_cast<Rule>(draw_rule(d.masked, rng)));
  }
  if (out.state.complete()) out.tree = tree_from_rules(out.state.rules());
  return out;
}

Sample sample_expression(Policy& policy, const Condition& condition, std::size_t length_limit,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_from_state(policy, condition, DerivationState(length_limit), rng);
}

std::vector<Completion> sample_from_prefix(Policy& policy, const RuleSeq& prefix, const Condition& condition,
                                           std::size_t n, std::uint64_t seed, std::size_t length_limit) {
  DerivationState start(std::max(length_limit, prefix.size()));
  for (Rule r : prefix) start.apply(r);

  std::mt19937_64 rng(seed);
  std::map<std::pair<std::string, bool>, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s = sample_from_state(policy, condition, start, rng);
    std::string key;
    if (s.complete()) {
      key = render(*s.tree);
    } else {
      for (int id : rules_to_ints(s.state.rules())) key += (key.empty() ? "" : ",") + std::to_string(id);
    }
    ++counts[{key, s.complete()}];
  }

  std::vector<Completion> out;
  for (const auto& [key, count] : counts) {
    out.push_back({key.first, key.second, static_cast<double>(count) / static_cast<double>(n)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Completion& a, const Completion& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.expression < b.expression;
  });
  return out;
}

}  // namespace asymreg
