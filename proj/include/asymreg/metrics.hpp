#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "asymreg/corpus.hpp"
#include "asymreg/policy.hpp"
#include "asymreg/rational.hpp"

namespace asymreg {

/// One generated expression as seen by the metrics.
struct Generation {
  std::string text;  // empty when incomplete
  bool complete = false;
  std::optional<CanonicalKey> key;
  LeadingPowers powers;

  static Generation incomplete();
  static Generation of(const ExprTree& tree);
};

struct GenerationBatch {
  Condition condition;
  std::vector<Generation> items;
};

GenerationBatch generate_batch(Policy& policy, const Condition& condition, std::size_t k, std::uint64_t seed,
                               std::size_t length_limit = kDefaultLengthLimit);

bool matches(const Generation& g, const Condition& desired);

/// Fraction of the batch whose leading powers equal the desired condition.
double success_rate(const GenerationBatch& batch);
/// Mean |c0 - p0| + |cinf - pinf|, counting 18 for incomplete, zero and
/// undefined expressions.
double mean_l1(const GenerationBatch& batch);

/// Texts and canonical keys of a training corpus.
struct TrainingIndex {
  std::unordered_set<std::string> texts;
  std::unordered_set<std::string> keys;

  static TrainingIndex of(const std::vector<CorpusRecord>& records);
};

struct NoveltyCounts {
  std::size_t successes = 0;
  std::size_t syntactic = 0;  // unique matching texts absent from training
  std::size_t semantic = 0;   // unique matching keys absent from training
};

NoveltyCounts novelty_counts(const GenerationBatch& batch, const TrainingIndex& training);

struct Novelty {
  double syntactic = 0;
  double semantic = 0;
};

/// Unique novel counts divided by the batch size.
Novelty novelty(const GenerationBatch& batch, const TrainingIndex& training);

struct DiversityCurve {
  std::vector<std::size_t> syntactic;
  std::vector<std::size_t> semantic;
};

/// Unique matching texts and keys among the first n generations, n = 1..N.
DiversityCurve diversity_curve(const std::vector<Generation>& stream, const Condition& desired);

struct CellMetrics {
  Condition condition;
  std::size_t k = 0;
  double success = 0;
  double l1 = 0;
  NoveltyCounts counts;
};

/// Per-condition metrics over |c0| <= bound, |cinf| <= bound (361 cells for bound 9).
struct ConditionGrid {
  int bound = 9;
  std::vector<CellMetrics> cells;

  const CellMetrics& at(const Condition& c) const;
};

struct GridConfig {
  std::size_t k = 25;
  std::uint64_t seed = 0;
  int bound = 9;
  std::size_t length_limit = kDefaultLengthLimit;
  std::size_t workers = 1;
  /// Restrict generation to these conditions; empty means the whole grid.
  std::vector<Condition> only;
};

/// Generates k expressions per cell. Each cell has its own seed derived from
/// (seed, condition), so results do not depend on evaluation order. Each
/// worker gets its own policy from the factory.
ConditionGrid evaluate_grid(const PolicyFactory& factory, const TrainingIndex& training, const GridConfig& config);

/// Columns of the generative-model comparison table.
struct ModelReport {
  std::string model;
  // In-sample (complexity <= 4): averages over the 41 conditions, in percent.
  double in_success = 0;
  double in_syntactic = 0;
  double in_semantic = 0;
  double in_mean_l1 = 0;
  // Out-of-sample: totals over all other cells.
  std::size_t out_success = 0;
  std::size_t out_syntactic = 0;
  std::size_t out_semantic = 0;
  std::size_t out_conditions_with_success = 0;
  /// Mean L1 over cells of complexity 5, 6 and 7.
  std::map<int, double> mean_l1_by_complexity;
};

ModelReport aggregate(const std::string& model, const ConditionGrid& grid, int in_sample_max_complexity = 4);

/// CSV rows "c0,cinf,metric,value" for success, l1, syntactic and semantic.
void write_grid_csv(const ConditionGrid& grid, std::ostream& out);

}  // namespace asymreg
