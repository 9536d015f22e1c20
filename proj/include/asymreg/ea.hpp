#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "asymreg/mcts.hpp"
#include "asymreg/objective.hpp"
#include "asymreg/optree.hpp"

namespace asymreg {

struct EaConfig {
  std::size_t population = 10;
  double p_mate = 0.1;
  double p_mutate = 0.5;
  int max_height = 50;
  /// Objective evaluations of offspring. The initial population is evaluated
  /// on top of this budget.
  std::size_t eval_budget = 500;
  std::size_t tournament = 3;
  int init_min_height = 1;
  int init_max_height = 6;
  int mutation_max_height = 2;
  /// Safety stop for runs whose offspring stop needing evaluation.
  std::size_t max_generations = 100000;
  ObjectiveMode mode = ObjectiveMode::data_only;
  std::uint64_t seed = 0;
};

/// Grow method: height drawn uniformly from [min_height, max_height]. Nodes
/// above min_height are operators; between min_height and the drawn height each
/// node is a terminal with probability 2/6 (the terminal share of the primitive
/// set); at the drawn height always a terminal.
OpTree grow_tree(std::mt19937_64& rng, int min_height, int max_height);

std::vector<OpTree> init_population(const EaConfig& config, std::mt19937_64& rng);

/// Swaps the subtrees rooted at one random non-root node of each parent.
void one_point_crossover(OpTree& a, OpTree& b, std::mt19937_64& rng);
/// Replaces a random subtree with a grown tree of height 0..mutation_max_height.
void uniform_mutation(OpTree& tree, std::mt19937_64& rng, int max_height);

struct EaTrace {
  /// Best objective seen so far after each generation (index 0 = initial population).
  std::vector<double> best_by_generation;
  std::size_t max_height_seen = 0;
};

/// Generational loop: tournament selection, crossover and mutation, height
/// limit enforced by reverting to the parent, stopping when the evaluation
/// budget is spent. Returns the best individual ever evaluated.
SearchOutcome evolve(const TargetSpec& target, const EaConfig& config, EaTrace* trace = nullptr);

}  // namespace asymreg
