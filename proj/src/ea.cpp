#include "asymreg/ea.hpp"

#include <algorithm>
#include <optional>

#include "asymreg/sampling.hpp"

namespace asymreg {

namespace {

constexpr Op kBinary[] = {Op::add, Op::sub, Op::mul, Op::div};
constexpr Op kTerminals[] = {Op::x, Op::one};

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(unit_draw(rng) * n); }

void grow_into(std::vector<Op>& out, std::mt19937_64& rng, int depth, int min_height, int height) {
  bool terminal = depth >= height || (depth >= min_height && unit_draw(rng) < 2.0 / 6.0);
  if (terminal) {
    out.push_back(kTerminals[pick(rng, 2)]);
    return;
  }
  out.push_back(kBinary[pick(rng, 4)]);
  grow_into(out, rng, depth + 1, min_height, height);
  grow_into(out, rng, depth + 1, min_height, height);
}

}  // namespace

OpTree grow_tree(std::mt19937_64& rng, int min_height, int max_height) {
  int height = min_height + static_cast<int>(pick(rng, static_cast<std::size_t>(max_height - min_height + 1)));
  std::vector<Op> nodes;
  grow_into(nodes, rng, 0, min_height, height);
  return OpTree(std::move(nodes));
}

std::vector<OpTree> init_population(const EaConfig& config, std::mt19937_64& rng) {
  std::vector<OpTree> pop;
  pop.reserve(config.population);
  for (std::size_t i = 0; i < config.population; ++i) {
    pop.push_back(grow_tree(rng, config.init_min_height, config.init_max_height));
  }
  return pop;
}

void one_point_crossover(OpTree& a, OpTree& b, std::mt19937_64& rng) {
  if (a.size() < 2 || b.size() < 2) return;
  std::size_t ia = 1 + pick(rng, a.size() - 1);
  std::size_t ib = 1 + pick(rng, b.size() - 1);
  OpTree sa = a.subtree(ia);
  OpTree sb = b.subtree(ib);
  a = a.with_subtree(ia, sb);
  b = b.with_subtree(ib, sa);
}

void uniform_mutation(OpTree& tree, std::mt19937_64& rng, int max_height) {
  std::size_t i = pick(rng, tree.size());
  tree = tree.with_subtree(i, grow_tree(rng, 0, max_height));
}

namespace {

struct Individual {
  OpTree tree;
  std::optional<double> fitness;
};

}  // namespace

SearchOutcome evolve(const TargetSpec& target, const EaConfig& config, EaTrace* trace) {
  std::mt19937_64 rng(config.seed);
  SearchOutcome out;

  auto consider = [&](const OpTree& tree, double fitness) {
    if (!out.best || fitness < out.best_objective) {
      out.best = tree;
      out.best_objective = fitness;
    }
  };
  auto note_height = [&](const OpTree& tree) {
    if (trace) trace->max_height_seen = std::max<std::size_t>(trace->max_height_seen, tree.height());
  };

  std::vector<Individual> pop;
  for (auto& t : init_population(config, rng)) {
    double f = objective(t, target, config.mode);
    consider(t, f);
    note_height(t);
    pop.push_back({std::move(t), f});
  }
  if (trace) trace->best_by_generation.push_back(out.best_objective);

  std::size_t used = 0;
  std::size_t generation = 0;
  while (used < config.eval_budget && generation < config.max_generations && !pop.empty()) {
    ++generation;
    std::vector<Individual> offspring;
    offspring.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      std::size_t winner = pick(rng, pop.size());
      for (std::size_t k = 1; k < config.tournament; ++k) {
        std::size_t c = pick(rng, pop.size());
        if (*pop[c].fitness < *pop[winner].fitness) winner = c;
      }
      offspring.push_back(pop[winner]);
    }
    std::vector<Individual> parents = offspring;

    for (std::size_t i = 1; i < offspring.size(); i += 2) {
      if (unit_draw(rng) < config.p_mate) {
        one_point_crossover(offspring[i - 1].tree, offspring[i].tree, rng);
        offspring[i - 1].fitness.reset();
        offspring[i].fitness.reset();
      }
    }
    for (auto& ind : offspring) {
      if (unit_draw(rng) < config.p_mutate) {
        uniform_mutation(ind.tree, rng, config.mutation_max_height);
        ind.fitness.reset();
      }
    }
    for (std::size_t i = 0; i < offspring.size(); ++i) {
      if (offspring[i].tree.height() > config.max_height) offspring[i] = parents[i];
    }

    for (auto& ind : offspring) {
      if (ind.fitness) continue;
      if (used >= config.eval_budget) {
        // Budget spent mid-generation; the loop ends after this pass.
        ind.fitness = kInvalidPenalty;
        continue;
      }
      ind.fitness = objective(ind.tree, target, config.mode);
      ++used;
      consider(ind.tree, *ind.fitness);
      note_height(ind.tree);
    }
    pop = std::move(offspring);
    if (trace) trace->best_by_generation.push_back(out.best_objective);
  }

  out.simulations = generation;
  out.evaluations = used;
  if (out.best) out.best_expr = render(tree_to_expr(*out.best));
  out.report = classify(out.best, target);
  return out;
}

}  // namespace asymreg
