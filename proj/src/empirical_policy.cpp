#include "asymreg/empirical_policy.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace asymreg {

EmpiricalVariant EmpiricalVariant::parse(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "fh") return {true, std::nullopt};
  if (s == "fhnc") return {false, std::nullopt};

  // "lh:8", "lh(8)", "lhnc:8", "lhnc(8)"
  bool conditioned = true;
  std::string_view rest(s);
  if (rest.rfind("lhnc", 0) == 0) {
    conditioned = false;
    rest.remove_prefix(4);
  } else if (rest.rfind("lh", 0) == 0) {
    rest.remove_prefix(2);
  } else {
    throw std::invalid_argument("unknown empirical policy: " + std::string(text));
  }
  if (!rest.empty() && (rest.front() == ':' || rest.front() == '(')) {
    if (rest.front() == '(' && rest.back() == ')') rest.remove_suffix(1);
    rest.remove_prefix(1);
  }
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw std::invalid_argument("bad history length in policy name: " + std::string(text));
  }
  std::size_t l = std::stoul(std::string(rest));
  if (l == 0) throw std::invalid_argument("history length must be positive");
  return {conditioned, l};
}

std::string EmpiricalVariant::name() const {
  std::string base = history ? "lh" : "fh";
  if (!conditioned) base += "nc";
  if (history) base += ":" + std::to_string(*history);
  return base;
}

EmpiricalIndex::EmpiricalIndex(std::span<const TrainingSequence> corpus, EmpiricalVariant variant)
    : variant_(variant) {
  for (const auto& seq : corpus) {
    for (std::size_t t = 1; t < seq.rules.size(); ++t) {
      std::span<const Rule> prefix(seq.rules.data(), t);
      counts_[key(prefix, seq.condition)][static_cast<std::size_t>(seq.rules[t])] += 1;
    }
  }
}

std::string EmpiricalIndex::key(std::span<const Rule> prefix, const Condition& condition) const {
  std::size_t take = prefix.size();
  if (variant_.history) take = std::min(take, *variant_.history);
  std::string k;
  k.reserve(take + 16);
  if (variant_.conditioned) {
    k += std::to_string(condition.c0);
    k += ',';
    k += std::to_string(condition.cinf);
    k += ';';
  }
  for (std::size_t i = prefix.size() - take; i < prefix.size(); ++i) {
    k.push_back(static_cast<char>('0' + rule_to_int(prefix[i])));
  }
  return k;
}

const EmpiricalIndex::Counts* EmpiricalIndex::lookup(std::span<const Rule> prefix,
                                                     const Condition& condition) const {
  auto it = counts_.find(key(prefix, condition));
  return it == counts_.end() ? nullptr : &it->second;
}

EmpiricalPolicy::EmpiricalPolicy(std::shared_ptr<const EmpiricalIndex> index, UnseenContext unseen)
    : index_(std::move(index)), unseen_(unseen) {}

PolicyDistribution EmpiricalPolicy::next_distribution(const DerivationState& state, const Condition& condition) {
  RuleMask mask = valid_next_mask(state);
  if (state.rules().empty()) {
    // Every stored sequence starts with O -> S.
    RuleProbs raw{};
    raw[0] = 1.0;
    return mask_distribution(raw, mask);
  }
  const auto* counts = index_->lookup(state.rules(), condition);
  if (!counts) {
    RuleProbs raw;
    raw.fill(1.0);
    auto d = mask_distribution(raw, mask);
    d.raw.fill(0.0);
    d.abstained = unseen_ == UnseenContext::abstain;
    return d;
  }
  RuleProbs raw{};
  double total = 0;
  for (std::size_t i = 0; i < kNumRules; ++i) total += static_cast<double>((*counts)[i]);
  for (std::size_t i = 0; i < kNumRules; ++i) raw[i] = static_cast<double>((*counts)[i]) / total;
  return mask_distribution(raw, mask);
}

std::unique_ptr<Policy> build_empirical(std::span<const TrainingSequence> corpus, EmpiricalVariant variant,
                                        UnseenContext unseen) {
  return std::make_unique<EmpiricalPolicy>(std::make_shared<const EmpiricalIndex>(corpus, variant), unseen);
}

}  // namespace asymreg
