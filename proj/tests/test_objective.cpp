#include <cmath>
#include <numeric>

#include "doctest.h"

#include "asymreg/objective.hpp"

using namespace asymreg;

namespace {

const char* kU = "1 / x + x + ( x - 1 ) * ( x - 1 )";

OpTree tree(const char* text) { return to_optree(parse_text(text)); }

// Values from the force-field case study table with the decimals it prints.
struct Row {
  const char* candidate;
  double train, inter, ext;
  int d_train, d_inter, d_ext;
  int dp;
};

const Row kRows[] = {
    {"1 - x + ( 1 / x ) + x * x", 0, 0, 0, 2, 2, 2, 0},
    {"( x ) - ( 1 / x ) / ( x * x / x ) + x", 0.47, 0.29, 34.9, 2, 2, 1, 2},
    {"( ( 1 / x ) - x + x ) - ( ( 1 - x ) * x )", 1.0, 1.0, 1.0, 1, 1, 1, 0},
    {"( x + x )", 0.52, 0.46, 34.8, 2, 2, 1, 3},
    {"( ( 1 / x ) + ( x * x ) )", 1.15, 1.10, 6.16, 2, 2, 2, 0},
};

double rounded(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

}  // namespace

TEST_SUITE("objective") {
  TEST_CASE("point sets") {
    CHECK(PointSet::train().xs == std::vector<double>{1.2, 1.6, 2.0, 2.4, 2.8});
    CHECK(PointSet::interpolation().xs == std::vector<double>{1.4, 1.8, 2.2, 2.6});
    CHECK(PointSet::extrapolation().xs == std::vector<double>{5, 6, 7, 8, 9});
  }

  TEST_CASE("target spec") {
    auto t = TargetSpec::from_text(kU);
    CHECK(t.condition == Condition{-1, 2});
    CHECK(t.train_values.size() == 5);
    CHECK(t.train_values == t.clean_train);
    CHECK_THROWS_AS(TargetSpec::from_text("x - x"), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::from_text("1 / ( x - x )"), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::from_text("1 / ( x - 1 - 1 )"), std::invalid_argument);
  }

  TEST_CASE("case study rows reproduce") {
    auto target = TargetSpec::from_text(kU);
    for (const Row& row : kRows) {
      CAPTURE(row.candidate);
      auto report = classify(tree(row.candidate), target);
      CHECK(std::abs(rounded(report.dg_train, row.d_train) - row.train) <= 0.01);
      CHECK(std::abs(rounded(report.dg_int, row.d_inter) - row.inter) <= 0.01);
      CHECK(std::abs(rounded(report.dg_ext, row.d_ext) - row.ext) <= 0.01);
      CHECK(report.dp.value == row.dp);
      CHECK_FALSE(report.dp.sentinel);
    }
    CHECK(classify(tree(kRows[0].candidate), target).status == EvalStatus::solved);
    CHECK(classify(tree(kRows[4].candidate), target).status == EvalStatus::unsolved);
  }

  TEST_CASE("rmse properties") {
    auto target = TargetSpec::from_text(kU);
    CHECK(rmse(target.tree, target, target.train) == 0);
    CHECK(rmse(target.tree, target, target.extrapolation) == 0);
    // Permutation invariance.
    std::vector<double> xs{2.8, 1.2, 2.4, 1.6, 2.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(evaluate(target.tree, x));
    OpTree cand = tree("x * x");
    CHECK(rmse(cand, xs, ys) == doctest::Approx(rmse(cand, target, target.train)));
    // Scaling: doubling the difference doubles the error.
    std::vector<double> base, shifted;
    for (double x : target.train.xs) {
      base.push_back(evaluate(cand, x) + 0.25);
      shifted.push_back(evaluate(cand, x) + 0.5);
    }
    CHECK(rmse(cand, target.train.xs, shifted) == doctest::Approx(2 * rmse(cand, target.train.xs, base)));
    CHECK(std::isinf(rmse(tree("1 / ( x - 1 - 1 )"), target, target.train)));
  }

  TEST_CASE("dp_error") {
    auto target = TargetSpec::from_text(kU);
    CHECK(dp_error(tree("( x ) - ( 1 / x ) / ( x * x / x ) + x"), target.condition) == PowerError{2, false});
    CHECK(dp_error(target.tree, target.condition) == PowerError{0, false});
    CHECK(dp_error(tree("x - x"), target.condition) == PowerError{kPowerSentinel, true});
    CHECK(dp_error(std::optional<OpTree>{}, target.condition) == PowerError{18, true});
  }

  TEST_CASE("objective modes") {
    auto target = TargetSpec::from_text(kU);
    CHECK(objective(target.tree, target, ObjectiveMode::data_plus_pw) == 0);
    CHECK(objective(tree("( ( 1 / x ) + ( x * x ) )"), target, ObjectiveMode::data_plus_pw) ==
          doctest::Approx(1.15).epsilon(0.005));
    double gvae = objective(tree("( x ) - ( 1 / x ) / ( x * x / x ) + x"), target, ObjectiveMode::data_plus_pw);
    CHECK(std::abs(gvae - 2.47) < 0.01);
    CHECK(objective(tree("( x + x )"), target, ObjectiveMode::pw_only) == 3);
    CHECK(objective(std::nullopt, target, ObjectiveMode::data_only) == kInvalidPenalty);
    CHECK(objective(tree("1 / ( x - x )"), target, ObjectiveMode::pw_only) == kInvalidPenalty);
    CHECK(objective(tree("1 / ( x - 1 - 1 )"), target, ObjectiveMode::data_only) == kInvalidPenalty);
    for (auto m : {ObjectiveMode::data_only, ObjectiveMode::pw_only, ObjectiveMode::data_plus_pw}) {
      CHECK(objective_mode_from_string(to_string(m)) == m);
    }
  }

  TEST_CASE("classification") {
    auto target = TargetSpec::from_text(kU);
    CHECK(classify(target.tree, target).status == EvalStatus::solved);
    auto incomplete = classify(std::nullopt, target);
    CHECK(incomplete.status == EvalStatus::invalid);
    CHECK(incomplete.dp.sentinel);
    CHECK(classify(tree("1 / ( x - x )"), target).status == EvalStatus::invalid);
    CHECK(classify(tree("1 / ( x - 1 - 1 )"), target).status == EvalStatus::invalid);
    CHECK(classify(tree("x - x"), target).status == EvalStatus::unsolved);
  }

  TEST_CASE("noise") {
    auto target = TargetSpec::from_text(kU);
    auto same = perturb_with_noise(target, 0, 1);
    CHECK(same.train_values == target.train_values);
    auto a = perturb_with_noise(target, 0.5, 42);
    auto b = perturb_with_noise(target, 0.5, 42);
    CHECK(a.train_values == b.train_values);
    CHECK(a.train_values != target.train_values);
    CHECK(a.clean_train == target.clean_train);
    CHECK(a.clean_extrapolation == target.clean_extrapolation);
    CHECK(classify(a.tree, a).status == EvalStatus::solved);
    CHECK(classify(a.tree, a).dg_train > 0);

    double sum = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) sum += perturb_with_noise(target, 0.5, s).train_values[0];
    CHECK(std::abs(sum / 10000 - target.clean_train[0]) < 0.02);
    CHECK_THROWS_AS(perturb_with_noise(target, -1, 0), std::invalid_argument);
  }
}
