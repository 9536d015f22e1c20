#include "asymreg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "asymreg/objective.hpp"
#include "asymreg/optree.hpp"
#include "asymreg/parallel.hpp"

namespace asymreg {

CorpusRecord make_record(const ExprTree& tree) {
  CorpusRecord rec;
  rec.expr = render(tree);
  rec.rules = to_rules(tree);
  auto form = to_rational(tree);
  if (!form) {
    rec.key = CanonicalKey::undefined();
    return rec;
  }
  LeadingPowers lp = leading_powers(*form);
  rec.key = CanonicalKey::of(reduce(*form));
  if (lp.defined()) rec.condition = lp.condition();
  return rec;
}

namespace {

// Fewest rules that can finish a pending symbol: O -> S -> T -> x, S -> T -> x, T -> x.
std::size_t min_to_finish(const std::vector<Symbol>& stack) {
  std::size_t n = 0;
  for (Symbol s : stack) n += s == Symbol::O ? 3 : s == Symbol::S ? 2 : 1;
  return n;
}

void visit_from(DerivationState& state, std::size_t max_rules, const std::function<void(const RuleSeq&)>& visit) {
  if (state.complete()) {
    visit(state.rules());
    return;
  }
  RuleMask mask = valid_next_mask(state);
  for (std::size_t r = 0; r < kNumRules; ++r) {
    if (!mask[r]) continue;
    DerivationState next = state.after(static_cast<Rule>(r));
    if (next.rules().size() + min_to_finish(next.stack()) > max_rules) continue;
    visit_from(next, max_rules, visit);
  }
}

}  // namespace

void for_each_derivation(std::size_t max_rules, const std::function<void(const RuleSeq&)>& visit) {
  DerivationState root(std::max<std::size_t>(max_rules, 1));
  if (max_rules < 3) return;
  visit_from(root, max_rules, visit);
}

std::vector<CorpusRecord> enumerate_expressions(std::size_t max_rules, std::size_t workers) {
  std::vector<RuleSeq> all;
  for_each_derivation(max_rules, [&](const RuleSeq& rules) { all.push_back(rules); });
  std::vector<CorpusRecord> out(all.size());
  parallel_for(all.size(), workers, [&](std::size_t i) { out[i] = make_record(tree_from_rules(all[i])); });
  return out;
}

BigInt space_size(std::size_t max_rules) {
  if (max_rules == 0) return 1;
  std::vector<BigInt> ns(max_rules + 1), nt(max_rules + 1);
  ns[0] = 1;
  nt[0] = 1;
  for (std::size_t i = 1; i <= max_rules; ++i) {
    nt[i] = ns[i - 1] + 2;
    BigInt sum = 0;
    for (std::size_t p = 0; p < i; ++p) sum += ns[p] * nt[i - 1 - p];
    ns[i] = 4 * sum + nt[i - 1];
  }
  return ns[max_rules - 1];
}

namespace {

bool shorter(const CorpusRecord& a, const CorpusRecord& b) {
  if (a.expr.size() != b.expr.size()) return a.expr.size() < b.expr.size();
  return a.expr < b.expr;
}

}  // namespace

std::vector<CorpusRecord> downsample(const std::vector<CorpusRecord>& records, std::size_t per_group) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) groups[records[i].key.str()].push_back(i);
  std::vector<CorpusRecord> out;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return shorter(records[a], records[b]); });
    for (std::size_t j = 0; j < std::min(per_group, idx.size()); ++j) out.push_back(records[idx[j]]);
  }
  return out;
}

const std::vector<std::string>& augmentation_replacements() {
  static const std::vector<std::string> kReplacements = {
      "( 1 / x )",       "( x / ( 1 + x ) )", "( x / ( 1 - x ) )", "( 1 / ( 1 + x ) )",
      "( 1 / ( 1 - x ) )", "( 1 - x )",       "( 1 + x )",         "( x * x )",
      "( x * ( 1 + x ) )", "( x * ( 1 - x ) )"};
  return kReplacements;
}

namespace {

const std::vector<ExprTree>& replacement_trees() {
  static const std::vector<ExprTree> kTrees = [] {
    std::vector<ExprTree> trees;
    for (const auto& text : augmentation_replacements()) trees.push_back(parse_text(text));
    return trees;
  }();
  return kTrees;
}

bool replace_nth_leaf(ExprTree& node, std::size_t& remaining, const ExprTree& replacement) {
  if (node.is_leaf()) {
    if (remaining == 0) {
      node = replacement;
      return true;
    }
    --remaining;
    return false;
  }
  for (ExprTree& child : node.children()) {
    if (replace_nth_leaf(child, remaining, replacement)) return true;
  }
  return false;
}

}  // namespace

ExprTree replace_leaf(const ExprTree& tree, std::size_t leaf_index, std::size_t replacement) {
  if (replacement >= replacement_trees().size()) throw std::out_of_range("replacement index out of range");
  ExprTree out = tree;
  std::size_t remaining = leaf_index;
  if (!replace_nth_leaf(out, remaining, replacement_trees()[replacement])) {
    throw std::out_of_range("leaf index out of range");
  }
  return out;
}

std::vector<CorpusRecord> augment(const std::vector<CorpusRecord>& records, std::uint64_t seed,
                                  std::size_t children, std::size_t workers) {
  std::vector<std::vector<CorpusRecord>> made(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    ExprTree tree = tree_from_rules(records[i].rules);
    std::size_t leaves = leaf_count(tree);
    made[i].reserve(children);
    for (std::size_t c = 0; c < children; ++c) {
      std::size_t leaf = rng() % leaves;
      std::size_t repl = rng() % replacement_trees().size();
      made[i].push_back(make_record(replace_leaf(tree, leaf, repl)));
    }
  });
  std::vector<CorpusRecord> out;
  out.reserve(records.size() * (children + 1));
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back(records[i]);
    for (auto& r : made[i]) out.push_back(std::move(r));
  }
  return out;
}

std::vector<CorpusRecord> dedupe_by_text(std::vector<CorpusRecord> records) {
  std::unordered_set<std::string> seen;
  std::vector<CorpusRecord> out;
  out.reserve(records.size());
  for (auto& r : records) {
    if (seen.insert(r.expr).second) out.push_back(std::move(r));
  }
  return out;
}

DatasetConfig DatasetConfig::desk() { return DatasetConfig{}; }

DatasetConfig DatasetConfig::full() {
  DatasetConfig c;
  c.rounds = 4;
  c.per_condition_cap = 1000;
  c.holdout_per_condition = 50;
  return c;
}

LengthStats length_stats(const std::vector<CorpusRecord>& records) {
  LengthStats s;
  s.count = records.size();
  if (records.empty()) return s;
  std::vector<std::size_t> lens;
  lens.reserve(records.size());
  for (const auto& r : records) lens.push_back(r.length());
  std::sort(lens.begin(), lens.end());
  s.min = lens.front();
  s.max = lens.back();
  s.median = lens[(lens.size() - 1) / 2];
  return s;
}

std::vector<Condition> conditions_up_to(int max_complexity) {
  std::vector<Condition> out;
  for (int c0 = -max_complexity; c0 <= max_complexity; ++c0) {
    for (int cinf = -max_complexity; cinf <= max_complexity; ++cinf) {
      if (std::abs(c0) + std::abs(cinf) <= max_complexity) out.push_back({c0, cinf});
    }
  }
  return out;
}

std::vector<Condition> conditions_with_complexity(int complexity) {
  std::vector<Condition> out;
  for (const auto& c : conditions_up_to(complexity)) {
    if (c.complexity() == complexity) out.push_back(c);
  }
  return out;
}

namespace {

std::uint64_t condition_salt(const Condition& c) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.c0)) << 32) |
         static_cast<std::uint32_t>(c.cinf);
}

// Holdout targets must be scorable: finite on the train, interpolation and
// extrapolation points.
bool finite_on_points(const CorpusRecord& r) {
  static const std::vector<PointSet> sets{PointSet::train(), PointSet::interpolation(), PointSet::extrapolation()};
  const OpTree tree = to_optree(tree_from_rules(r.rules));
  for (const auto& set : sets) {
    for (double x : set.xs) {
      if (!std::isfinite(evaluate(tree, x))) return false;
    }
  }
  return true;
}

// One finite expression (the shortest) for each of up to `k` keys not in
// `excluded`, keys visited in the order of `pool`.
std::vector<CorpusRecord> unique_key_sample(const std::vector<CorpusRecord>& pool,
                                            const std::unordered_set<std::string>& excluded, std::size_t k) {
  std::vector<std::string> order;
  std::unordered_map<std::string, const CorpusRecord*> best;
  for (const auto& r : pool) {
    std::string key = r.key.str();
    if (excluded.count(key) || !finite_on_points(r)) continue;
    auto it = best.find(key);
    if (it == best.end()) {
      order.push_back(key);
      best.emplace(key, &r);
    } else if (shorter(r, *it->second)) {
      it->second = &r;
    }
  }
  std::vector<CorpusRecord> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(*best.at(order[i]));
  return out;
}

}  // namespace

Dataset build_dataset(const DatasetConfig& config, const std::function<void(const std::string&)>& log) {
  auto note = [&](const std::string& msg) {
    if (log) log(msg);
  };
  Dataset ds;
  std::vector<CorpusRecord> pool = enumerate_expressions(config.max_rules, config.workers);
  ds.round_sizes.emplace_back(pool.size(), length_stats(pool).median);
  note("enumerated " + std::to_string(pool.size()) + " expressions");

  for (std::size_t round = 0; round < config.rounds; ++round) {
    pool = downsample(pool, config.per_group);
    pool = augment(pool, mix_seed(config.seed, 1000 + round), config.children, config.workers);
    pool = dedupe_by_text(std::move(pool));
    ds.round_sizes.emplace_back(pool.size(), length_stats(pool).median);
    note("round " + std::to_string(round + 1) + ": " + std::to_string(pool.size()) + " expressions");
  }
  pool = downsample(pool, config.per_group);

  std::map<Condition, std::vector<CorpusRecord>> by_condition;
  for (auto& r : pool) {
    if (r.condition) by_condition[*r.condition].push_back(std::move(r));
  }
  std::map<Condition, std::vector<CorpusRecord>> overflow;
  for (auto& [cond, recs] : by_condition) {
    std::stable_sort(recs.begin(), recs.end(), shorter);
    if (recs.size() > config.per_condition_cap) {
      overflow[cond].assign(recs.begin() + static_cast<std::ptrdiff_t>(config.per_condition_cap), recs.end());
      recs.resize(config.per_condition_cap);
    }
    std::mt19937_64 rng(mix_seed(config.seed, condition_salt(cond)));
    std::shuffle(recs.begin(), recs.end(), rng);
  }

  auto short_pool = [&](const Condition& c, std::size_t available, std::size_t wanted, const char* stage) {
    ds.shortfalls.push_back({c, available, wanted, stage});
    note(std::string(stage) + " " + to_string(c) + ": " + std::to_string(available) + " of " +
         std::to_string(wanted));
  };

  for (const Condition& c : conditions_up_to(config.in_sample_max_complexity)) {
    const auto& recs = by_condition[c];
    if (recs.size() < config.per_condition_cap) short_pool(c, recs.size(), config.per_condition_cap, "balance");
    const auto n = static_cast<double>(recs.size());
    auto n_train = static_cast<std::size_t>(n * config.train_fraction + 0.5);
    auto n_val = std::min(recs.size() - n_train, static_cast<std::size_t>(n * config.validation_fraction + 0.5));
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < n_train + n_val; ++i) {
      (i < n_train ? ds.train : ds.validation).push_back(recs[i]);
      seen.insert(recs[i].key.str());
    }
    // Remainder first, then the records cut by the cap, shortest first.
    std::vector<CorpusRecord> rest(recs.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), recs.end());
    const auto& extra = overflow[c];
    rest.insert(rest.end(), extra.begin(), extra.end());
    auto held = unique_key_sample(rest, seen, config.holdout_per_condition);
    if (held.size() < config.holdout_per_condition) {
      short_pool(c, held.size(), config.holdout_per_condition, "holdout");
    }
    ds.holdout_in_sample.insert(ds.holdout_in_sample.end(), held.begin(), held.end());
  }

  for (int m : config.holdout_complexities) {
    auto& out = ds.holdout_by_complexity[m];
    for (const Condition& c : conditions_with_complexity(m)) {
      std::vector<CorpusRecord> candidates = by_condition[c];
      const auto& extra = overflow[c];
      candidates.insert(candidates.end(), extra.begin(), extra.end());
      auto held = unique_key_sample(candidates, {}, config.holdout_per_condition);
      if (held.size() < config.holdout_per_condition) {
        short_pool(c, held.size(), config.holdout_per_condition, "holdout");
      }
      out.insert(out.end(), held.begin(), held.end());
    }
  }
  return ds;
}

}  // namespace asymreg
