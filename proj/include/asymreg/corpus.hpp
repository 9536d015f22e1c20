#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asymreg/grammar.hpp"
#include "asymreg/poly.hpp"
#include "asymreg/rational.hpp"

namespace asymreg {

struct CorpusRecord {
  std::string expr;
  RuleSeq rules;
  CanonicalKey key;
  /// nullopt for zero and undefined functions.
  std::optional<Condition> condition;

  std::size_t length() const { return rules.size(); }
};

CorpusRecord make_record(const ExprTree& tree);

/// Visits every complete derivation with at most max_rules rules exactly once,
/// in lexicographic order of rule ids.
void for_each_derivation(std::size_t max_rules, const std::function<void(const RuleSeq&)>& visit);
std::vector<CorpusRecord> enumerate_expressions(std::size_t max_rules, std::size_t workers = 1);

/// Size of the derivation space within max_rules rules, counting non-terminal
/// (partial) expressions, from the recursion
///   N_S(i) = 4 * sum_{p<i} N_S(p) N_T(i-1-p) + N_T(i-1),  N_T(i) = N_S(i-1) + 2,
///   N_S(0) = N_T(0) = 1,  N_O(i) = N_S(i-1).
BigInt space_size(std::size_t max_rules);

/// Keeps the `per_group` shortest expressions (by string length, then text,
/// then input order) of every canonical-key group. Output is ordered by key.
std::vector<CorpusRecord> downsample(const std::vector<CorpusRecord>& records, std::size_t per_group = 20);

/// The ten subexpressions a leaf can be replaced with during augmentation.
const std::vector<std::string>& augmentation_replacements();

/// Replaces the `leaf_index`-th leaf (preorder, counting 'x' and '1') with
/// replacement number `replacement`.
ExprTree replace_leaf(const ExprTree& tree, std::size_t leaf_index, std::size_t replacement);

/// Each record followed by `children` variants, each replacing one uniformly
/// chosen leaf with a uniformly chosen replacement.
std::vector<CorpusRecord> augment(const std::vector<CorpusRecord>& records, std::uint64_t seed,
                                  std::size_t children = 5, std::size_t workers = 1);

/// First occurrence of each expression text, in input order.
std::vector<CorpusRecord> dedupe_by_text(std::vector<CorpusRecord> records);

struct DatasetConfig {
  std::size_t max_rules = 10;
  std::size_t rounds = 2;
  std::size_t per_group = 20;
  std::size_t children = 5;
  std::size_t per_condition_cap = 40;
  std::size_t holdout_per_condition = 5;
  double train_fraction = 0.7;
  double validation_fraction = 0.1;
  int in_sample_max_complexity = 4;
  std::vector<int> holdout_complexities{5, 6};
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  static DatasetConfig desk();
  static DatasetConfig full();
};

struct LengthStats {
  std::size_t count = 0;
  std::size_t min = 0;
  std::size_t median = 0;  // lower median
  std::size_t max = 0;
};

LengthStats length_stats(const std::vector<CorpusRecord>& records);

struct ShortPool {
  Condition condition;
  std::size_t available = 0;
  std::size_t wanted = 0;
  std::string stage;
};

struct Dataset {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> validation;
  /// Holdout expressions are finite on every train, interpolation and
  /// extrapolation point, so each one is a valid search target.
  std::vector<CorpusRecord> holdout_in_sample;
  /// Holdout sets for each out-of-sample complexity in the config.
  std::map<int, std::vector<CorpusRecord>> holdout_by_complexity;
  /// Pool size and median rule length after the initial enumeration and after
  /// each augmentation round.
  std::vector<std::pair<std::size_t, std::size_t>> round_sizes;
  std::vector<ShortPool> shortfalls;
};

/// enumerate -> (downsample -> augment -> dedupe) x rounds -> downsample ->
/// per-condition balancing -> train/validation split and holdouts.
Dataset build_dataset(const DatasetConfig& config, const std::function<void(const std::string&)>& log = {});

/// All integer conditions with |c0| + |cinf| <= max_complexity, sorted.
std::vector<Condition> conditions_up_to(int max_complexity);
std::vector<Condition> conditions_with_complexity(int complexity);

}  // namespace asymreg
