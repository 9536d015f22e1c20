#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asymreg/ea.hpp"
#include "asymreg/json_io.hpp"
#include "asymreg/mcts.hpp"
#include "asymreg/objective.hpp"
#include "asymreg/policy.hpp"

namespace asymreg {

/// The symbolic regression methods compared in the results table.
enum class Method { mcts, mcts_pw_only, mcts_pw, ng_mcts, ea, ea_pw };

std::string_view to_string(Method m);
/// Accepts "ng-mcts" and "ng_mcts" spellings.
Method method_from_string(std::string_view text);
ObjectiveMode method_mode(Method m);
bool is_mcts(Method m);
/// Only NG-MCTS takes a prior; the other MCTS methods search with the uniform one.
bool uses_prior(Method m);

/// Where NG-MCTS gets its policy. `shared` is created once per worker and
/// reused across targets (a service connection or an empirical table);
/// `per_target` builds a policy for one target (the teacher prior).
struct PriorSource {
  PolicyFactory shared;
  std::function<std::unique_ptr<Policy>(const ExprTree& target)> per_target;
};

struct BatchConfig {
  Method method = Method::ng_mcts;
  MctsConfig mcts;
  EaConfig ea;
  double noise_sd = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct TargetResult {
  std::string target;
  Method method = Method::mcts;
  std::optional<Condition> condition;
  std::string best_expr;
  EvalReport report;
  std::size_t sims = 0;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  /// Target could not be set up or the policy failed.
  std::optional<std::string> error;
};

/// Per-target seed: splitmix of the batch seed and the target's position.
std::uint64_t target_seed(std::uint64_t batch_seed, std::size_t index);

/// Searches every target independently. Results come back in target order
/// regardless of worker count; a failing target is recorded and skipped.
std::vector<TargetResult> run_batch(const std::vector<std::string>& targets, const BatchConfig& config,
                                    const PriorSource& prior = {});

/// One target, one seed; run_batch calls this per target.
TargetResult run_target(const std::string& target, const BatchConfig& config, std::uint64_t seed, Policy* prior);

/// Scores fixed candidate expressions against a target without searching.
TargetResult evaluate_fixture(const std::string& target, const std::string& candidate, Method method);

Json to_json(const TargetResult& r);
TargetResult result_from_json(const Json& row);

/// Results-table columns for one method.
struct MethodSummary {
  std::string method;
  std::size_t targets = 0;
  double solved_pct = 0;
  double invalid_pct = 0;
  double hard_pct = 0;
  std::size_t hard = 0;
  /// Medians over hard targets; nullopt when there are none or the value is
  /// not reported (train error for the leading-power-only objective).
  std::optional<double> median_dg_train;
  std::optional<double> median_dg_int;
  std::optional<double> median_dg_ext;
  std::optional<double> median_dp;
};

/// Median with the mean of the two middle values for even sizes; +inf entries
/// are ordered last.
std::optional<double> median(std::vector<double> values);

/// Summary of one method where hard means not solved by that method.
MethodSummary summarize(const std::vector<TargetResult>& results);

/// Joins several methods' results by target text. A target is hard when no
/// method solved it; every method's medians are taken over that shared set.
std::vector<MethodSummary> join_summaries(const std::vector<std::vector<TargetResult>>& per_method);

Json to_json(const MethodSummary& s);

}  // namespace asymreg
