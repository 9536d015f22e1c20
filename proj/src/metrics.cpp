#include "asymreg/metrics.hpp"

#include <cstdlib>
#include <stdexcept>

#include "asymreg/objective.hpp"
#include "asymreg/parallel.hpp"
#include "asymreg/sampling.hpp"

namespace asymreg {

Generation Generation::incomplete() { return Generation{}; }

Generation Generation::of(const ExprTree& tree) {
  Generation g;
  g.text = render(tree);
  g.complete = true;
  auto form = to_rational(tree);
  g.powers = leading_powers(form);
  g.key = form ? CanonicalKey::of(reduce(*form)) : CanonicalKey::undefined();
  return g;
}

GenerationBatch generate_batch(Policy& policy, const Condition& condition, std::size_t k, std::uint64_t seed,
                               std::size_t length_limit) {
  GenerationBatch batch{condition, {}};
  batch.items.reserve(k);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    Sample s = sample_from_state(policy, condition, DerivationState(length_limit), rng);
    batch.items.push_back(s.tree ? Generation::of(*s.tree) : Generation::incomplete());
  }
  return batch;
}

bool matches(const Generation& g, const Condition& desired) {
  return g.complete && g.powers.defined() && g.powers.condition() == desired;
}

double success_rate(const GenerationBatch& batch) {
  if (batch.items.empty()) return 0;
  std::size_t n = 0;
  for (const auto& g : batch.items) n += matches(g, batch.condition);
  return static_cast<double>(n) / static_cast<double>(batch.items.size());
}

double mean_l1(const GenerationBatch& batch) {
  if (batch.items.empty()) return 0;
  double sum = 0;
  for (const auto& g : batch.items) {
    sum += g.complete ? dp_error(g.powers, batch.condition).value : kPowerSentinel;
  }
  return sum / static_cast<double>(batch.items.size());
}

TrainingIndex TrainingIndex::of(const std::vector<CorpusRecord>& records) {
  TrainingIndex idx;
  for (const auto& r : records) {
    idx.texts.insert(r.expr);
    idx.keys.insert(r.key.str());
  }
  return idx;
}

NoveltyCounts novelty_counts(const GenerationBatch& batch, const TrainingIndex& training) {
  NoveltyCounts c;
  std::unordered_set<std::string> texts, keys;
  for (const auto& g : batch.items) {
    if (!matches(g, batch.condition)) continue;
    ++c.successes;
    if (!training.texts.count(g.text)) texts.insert(g.text);
    std::string key = g.key->str();
    if (!training.keys.count(key)) keys.insert(key);
  }
  c.syntactic = texts.size();
  c.semantic = keys.size();
  return c;
}

Novelty novelty(const GenerationBatch& batch, const TrainingIndex& training) {
  if (batch.items.empty()) return {};
  auto c = novelty_counts(batch, training);
  const auto k = static_cast<double>(batch.items.size());
  return {static_cast<double>(c.syntactic) / k, static_cast<double>(c.semantic) / k};
}

DiversityCurve diversity_curve(const std::vector<Generation>& stream, const Condition& desired) {
  DiversityCurve curve;
  std::unordered_set<std::string> texts, keys;
  for (const auto& g : stream) {
    if (matches(g, desired)) {
      texts.insert(g.text);
      keys.insert(g.key->str());
    }
    curve.syntactic.push_back(texts.size());
    curve.semantic.push_back(keys.size());
  }
  return curve;
}

const CellMetrics& ConditionGrid::at(const Condition& c) const {
  for (const auto& cell : cells) {
    if (cell.condition == c) return cell;
  }
  throw std::out_of_range("condition " + to_string(c) + " not in grid");
}

ConditionGrid evaluate_grid(const PolicyFactory& factory, const TrainingIndex& training, const GridConfig& config) {
  ConditionGrid grid;
  grid.bound = config.bound;
  std::vector<Condition> conditions = config.only;
  if (conditions.empty()) {
    for (int c0 = -config.bound; c0 <= config.bound; ++c0) {
      for (int cinf = -config.bound; cinf <= config.bound; ++cinf) conditions.push_back({c0, cinf});
    }
  }
  grid.cells.resize(conditions.size());

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, conditions.size()));
  std::vector<std::unique_ptr<Policy>> policies(workers);
  for (auto& p : policies) p = factory();
  parallel_for_workers(conditions.size(), workers, [&](std::size_t w, std::size_t i) {
    const Condition& c = conditions[i];
    std::uint64_t salt = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.c0)) << 32) |
                         static_cast<std::uint32_t>(c.cinf);
    auto batch = generate_batch(*policies[w], c, config.k, mix_seed(config.seed, salt), config.length_limit);
    grid.cells[i] = {c, config.k, success_rate(batch), mean_l1(batch), novelty_counts(batch, training)};
  });
  return grid;
}

ModelReport aggregate(const std::string& model, const ConditionGrid& grid, int in_sample_max_complexity) {
  ModelReport r;
  r.model = model;
  std::size_t in_cells = 0;
  std::map<int, std::pair<double, std::size_t>> l1_by_m;
  for (const auto& cell : grid.cells) {
    const int m = cell.condition.complexity();
    if (m <= in_sample_max_complexity) {
      ++in_cells;
      const double k = cell.k == 0 ? 1.0 : static_cast<double>(cell.k);
      r.in_success += 100.0 * cell.success;
      r.in_syntactic += 100.0 * static_cast<double>(cell.counts.syntactic) / k;
      r.in_semantic += 100.0 * static_cast<double>(cell.counts.semantic) / k;
      r.in_mean_l1 += cell.l1;
    } else {
      r.out_success += cell.counts.successes;
      r.out_syntactic += cell.counts.syntactic;
      r.out_semantic += cell.counts.semantic;
      r.out_conditions_with_success += cell.counts.successes > 0;
    }
    if (m >= 5 && m <= 7) {
      l1_by_m[m].first += cell.l1;
      ++l1_by_m[m].second;
    }
  }
  if (in_cells > 0) {
    const auto n = static_cast<double>(in_cells);
    r.in_success /= n;
    r.in_syntactic /= n;
    r.in_semantic /= n;
    r.in_mean_l1 /= n;
  }
  for (const auto& [m, acc] : l1_by_m) r.mean_l1_by_complexity[m] = acc.first / static_cast<double>(acc.second);
  return r;
}

void write_grid_csv(const ConditionGrid& grid, std::ostream& out) {
  out << "c0,cinf,metric,value\n";
  for (const auto& cell : grid.cells) {
    const auto k = cell.k == 0 ? 1.0 : static_cast<double>(cell.k);
    const std::string prefix = std::to_string(cell.condition.c0) + "," + std::to_string(cell.condition.cinf) + ",";
    out << prefix << "success," << cell.success << "\n";
    out << prefix << "l1," << cell.l1 << "\n";
    out << prefix << "syntactic," << static_cast<double>(cell.counts.syntactic) / k << "\n";
    out << prefix << "semantic," << static_cast<double>(cell.counts.semantic) / k << "\n";
  }
}

}  // namespace asymreg
