#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asymreg/grammar.hpp"
#include "asymreg/optree.hpp"
#include "asymreg/rational.hpp"

namespace asymreg {

struct PointSet {
  std::string name;
  std::vector<double> xs;

  static PointSet train();          // {1.2, 1.6, 2.0, 2.4, 2.8}
  static PointSet interpolation();  // {1.4, 1.8, 2.2, 2.6}
  static PointSet extrapolation();  // {5, 6, 7, 8, 9}
};

/// The expression a search is trying to recover. Searches only see
/// `train_values` and `condition`; the tree and the clean values are kept for
/// scoring.
struct TargetSpec {
  std::string expression;
  OpTree tree;
  Condition condition;
  PointSet train = PointSet::train();
  PointSet interpolation = PointSet::interpolation();
  PointSet extrapolation = PointSet::extrapolation();
  /// Observed values at the train points, possibly perturbed by noise.
  std::vector<double> train_values;
  std::vector<double> clean_train;
  std::vector<double> clean_interpolation;
  std::vector<double> clean_extrapolation;

  /// Throws std::invalid_argument when the expression has undefined or zero
  /// leading powers or is not finite on every point.
  static TargetSpec from_expression(const ExprTree& expr);
  static TargetSpec from_text(std::string_view text);
};

/// Adds i.i.d. Gaussian noise with standard deviation `sd` to the observed
/// train values only. Clean values are left untouched.
TargetSpec perturb_with_noise(const TargetSpec& target, double sd, std::uint64_t seed);

/// Root mean squared error; +infinity if the candidate has a pole or
/// non-finite value at any point.
double rmse(const OpTree& candidate, const std::vector<double>& xs, const std::vector<double>& truth);
double rmse(const OpTree& candidate, const TargetSpec& target, const PointSet& points);

/// Leading-power error with the undefined-power sentinel.
struct PowerError {
  int value = 0;
  bool sentinel = false;

  bool operator==(const PowerError&) const = default;
};

/// Worst-case magnitude used when leading powers are undefined; it is the L1
/// distance between conditions (0, 0) and (9, 9).
inline constexpr int kPowerSentinel = 18;
inline constexpr double kInvalidPenalty = 1e6;
inline constexpr double kSolvedTolerance = 1e-9;

PowerError dp_error(const LeadingPowers& achieved, const Condition& desired);
PowerError dp_error(const OpTree& candidate, const Condition& desired);
/// Incomplete candidates (std::nullopt) get the sentinel.
PowerError dp_error(const std::optional<OpTree>& candidate, const Condition& desired);

enum class ObjectiveMode { data_only, pw_only, data_plus_pw };

std::string_view to_string(ObjectiveMode mode);
ObjectiveMode objective_mode_from_string(std::string_view text);

/// Search objective: lower is better, zero is perfect. Incomplete or invalid
/// candidates score kInvalidPenalty.
double objective(const std::optional<OpTree>& candidate, const TargetSpec& target, ObjectiveMode mode);

enum class EvalStatus { solved, invalid, unsolved };
std::string_view to_string(EvalStatus status);

struct EvalReport {
  double dg_train = 0;
  double dg_int = 0;
  double dg_ext = 0;
  PowerError dp;
  EvalStatus status = EvalStatus::invalid;
};

/// Scores a candidate against a target. Solved needs interpolation and
/// extrapolation RMSE below 1e-9 against clean values and zero power error;
/// invalid covers incomplete, undefined and non-finite candidates.
EvalReport classify(const std::optional<OpTree>& candidate, const TargetSpec& target);

}  // namespace asymreg
