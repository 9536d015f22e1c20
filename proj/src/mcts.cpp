#include "asymreg/mcts.hpp"

#include <cmath>

#include "asymreg/sampling.hpp"

namespace asymreg {

double shape_reward(double objective, RewardShape shape) {
  if (!(objective >= 0)) return 0;
  return shape == RewardShape::reciprocal ? 1.0 / (1.0 + objective) : std::exp(-objective);
}

std::uint64_t SearchNode::total_visits() const {
  std::uint64_t n = 0;
  for (auto v : visits) n += v;
  return n;
}

double puct_score(const SearchNode& node, std::size_t action, double c_puct) {
  const double sum = static_cast<double>(node.total_visits());
  return node.q(action) + c_puct * node.prior[action] * std::sqrt(sum) / (1.0 + node.visits[action]);
}

std::size_t select_action(const SearchNode& node, double c_puct) {
  std::size_t best = kNumRules;
  double best_score = 0;
  for (std::size_t a = 0; a < kNumRules; ++a) {
    if (!node.valid[a]) continue;
    double s = puct_score(node, a, c_puct);
    if (best == kNumRules || s > best_score) {
      best = a;
      best_score = s;
    }
  }
  return best;
}

MctsSearch::MctsSearch(const TargetSpec& target, Policy& policy, MctsConfig config)
    : target_(target), policy_(policy), config_(config), rng_(config.seed) {
  nodes_.emplace_back(DerivationState(config_.length_limit));
  expand(nodes_.front());
  outcome_.nodes = nodes_.size();
}

void MctsSearch::expand(SearchNode& node) {
  if (node.terminal()) return;
  PolicyDistribution d = policy_.next_distribution(node.state, target_.condition);
  node.valid = valid_next_mask(node.state);
  node.prior = d.masked;
  node.expanded = true;
}

double MctsSearch::evaluate(const ExprTree& tree) {
  OpTree op = to_optree(tree);
  double obj = objective(op, target_, config_.mode);
  ++outcome_.evaluations;
  if (!outcome_.best || obj < outcome_.best_objective) {
    outcome_.best = op;
    outcome_.best_expr = render(tree);
    outcome_.best_objective = obj;
  }
  return shape_reward(obj, config_.reward);
}

double MctsSearch::simulate() {
  std::vector<std::pair<std::size_t, std::size_t>> path;
  std::size_t index = 0;
  while (!nodes_[index].terminal()) {
    std::size_t a = select_action(nodes_[index], config_.c_puct);
    path.emplace_back(index, a);
    std::int32_t next = nodes_[index].child[a];
    if (next < 0) {
      SearchNode leaf(nodes_[index].state.after(static_cast<Rule>(a)));
      expand(leaf);
      next = static_cast<std::int32_t>(nodes_.size());
      nodes_[index].child[a] = next;
      nodes_.push_back(std::move(leaf));
      index = static_cast<std::size_t>(next);
      break;
    }
    index = static_cast<std::size_t>(next);
  }

  const DerivationState& state = nodes_[index].state;
  double reward = 0;
  if (state.complete()) {
    reward = evaluate(tree_from_rules(state.rules()));
  } else if (!state.at_limit()) {
    Sample s = sample_from_state(policy_, target_.condition, state, rng_);
    if (s.tree) reward = evaluate(*s.tree);
  }

  for (auto [node, action] : path) {
    nodes_[node].visits[action] += 1;
    nodes_[node].reward[action] += reward;
  }
  ++outcome_.simulations;
  outcome_.nodes = nodes_.size();
  return reward;
}

SearchOutcome run_search(const TargetSpec& target, Policy& policy, const MctsConfig& config) {
  std::optional<MctsSearch> search;
  try {
    search.emplace(target, policy, config);
  } catch (const PolicyError& e) {
    SearchOutcome out;
    out.failure = std::string(kPolicyFailurePrefix) + e.what();
    out.report = classify(std::nullopt, target);
    return out;
  }
  SearchOutcome out;
  try {
    for (std::size_t i = 0; i < config.simulations; ++i) {
      search->simulate();
      if (config.stop_on_perfect && search->perfect()) break;
    }
    out = search->outcome();
  } catch (const PolicyError& e) {
    out = search->outcome();
    out.failure = std::string(kPolicyFailurePrefix) + e.what();
  }
  out.report = classify(out.best, target);
  return out;
}

}  // namespace asymreg
