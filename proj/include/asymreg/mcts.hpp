#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "asymreg/grammar.hpp"
#include "asymreg/objective.hpp"
#include "asymreg/optree.hpp"
#include "asymreg/policy.hpp"

namespace asymreg {

/// Best expression found by a search, scored against the target.
struct SearchOutcome {
  std::optional<OpTree> best;
  std::string best_expr;  // empty when nothing complete was evaluated
  double best_objective = kInvalidPenalty;
  EvalReport report;

  std::size_t simulations = 0;  // completed MCTS simulations or EA generations
  std::size_t evaluations = 0;  // objective calls
  std::size_t nodes = 0;        // MCTS tree nodes
  /// Set when the policy failed; statistics cover the work done before it.
  std::optional<std::string> failure;
};

enum class RewardShape { reciprocal, exponential };

/// 1 / (1 + objective) or exp(-objective); both map a perfect score to 1.
double shape_reward(double objective, RewardShape shape);

struct MctsConfig {
  std::size_t simulations = 500;
  double c_puct = 50;
  std::size_t length_limit = kDefaultLengthLimit;
  ObjectiveMode mode = ObjectiveMode::data_only;
  RewardShape reward = RewardShape::reciprocal;
  std::uint64_t seed = 0;
  /// End the search as soon as an expression with objective 0 is found.
  bool stop_on_perfect = true;
};

struct SearchNode {
  DerivationState state;
  RuleMask valid{};
  RuleProbs prior{};
  std::array<std::uint32_t, kNumRules> visits{};
  std::array<double, kNumRules> reward{};
  std::array<std::int32_t, kNumRules> child{};
  bool expanded = false;

  explicit SearchNode(DerivationState s) : state(std::move(s)) { child.fill(-1); }

  double q(std::size_t a) const { return visits[a] == 0 ? 0.0 : reward[a] / visits[a]; }
  std::uint64_t total_visits() const;
  bool terminal() const { return state.complete() || state.at_limit(); }
};

/// Q(s, a) + c * P(s, a) * sqrt(sum_b N(s, b)) / (1 + N(s, a)).
double puct_score(const SearchNode& node, std::size_t action, double c_puct);
/// argmax of puct_score over valid actions; ties go to the lowest rule id.
std::size_t select_action(const SearchNode& node, double c_puct);

class MctsSearch {
 public:
  /// Expands the root immediately, so a failing policy throws here.
  MctsSearch(const TargetSpec& target, Policy& policy, MctsConfig config);

  /// One select / expand / rollout / backup pass. Returns the reward backed up.
  double simulate();

  const SearchNode& root() const { return nodes_.front(); }
  const std::vector<SearchNode>& nodes() const { return nodes_; }
  const SearchOutcome& outcome() const { return outcome_; }
  bool perfect() const { return outcome_.best_objective == 0; }

 private:
  void expand(SearchNode& node);
  double evaluate(const ExprTree& tree);

  const TargetSpec& target_;
  Policy& policy_;
  MctsConfig config_;
  std::mt19937_64 rng_;
  std::vector<SearchNode> nodes_;
  SearchOutcome outcome_;
};

/// Prefix of SearchOutcome::failure when the policy threw.
inline constexpr const char* kPolicyFailurePrefix = "policy failure: ";

/// Runs up to config.simulations simulations. Policy errors end the run with
/// outcome.failure set rather than throwing.
SearchOutcome run_search(const TargetSpec& target, Policy& policy, const MctsConfig& config);

}  // namespace asymreg
