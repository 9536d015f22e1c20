#include "asymreg/objective.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace asymreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> values_at(const OpTree& tree, const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(evaluate(tree, x));
  return out;
}

bool all_finite(const std::vector<double>& v) {
  for (double d : v) {
    if (!std::isfinite(d)) return false;
  }
  return true;
}

}  // namespace

PointSet PointSet::train() { return {"train", {1.2, 1.6, 2.0, 2.4, 2.8}}; }
PointSet PointSet::interpolation() { return {"interpolation", {1.4, 1.8, 2.2, 2.6}}; }
PointSet PointSet::extrapolation() { return {"extrapolation", {5, 6, 7, 8, 9}}; }

TargetSpec TargetSpec::from_expression(const ExprTree& expr) {
  TargetSpec t;
  t.expression = render(expr);
  t.tree = to_optree(expr);
  auto lp = leading_powers(t.tree);
  if (!lp.defined()) throw std::invalid_argument("target has no defined leading powers: " + t.expression);
  t.condition = lp.condition();
  t.clean_train = values_at(t.tree, t.train.xs);
  t.clean_interpolation = values_at(t.tree, t.interpolation.xs);
  t.clean_extrapolation = values_at(t.tree, t.extrapolation.xs);
  if (!all_finite(t.clean_train) || !all_finite(t.clean_interpolation) ||
      !all_finite(t.clean_extrapolation)) {
    throw std::invalid_argument("target is not finite on the evaluation points: " + t.expression);
  }
  t.train_values = t.clean_train;
  return t;
}

TargetSpec TargetSpec::from_text(std::string_view text) { return from_expression(parse_text(text)); }

TargetSpec perturb_with_noise(const TargetSpec& target, double sd, std::uint64_t seed) {
  if (sd < 0) throw std::invalid_argument("noise standard deviation must be nonnegative");
  TargetSpec out = target;
  if (sd == 0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  for (std::size_t i = 0; i < out.train_values.size(); ++i) {
    out.train_values[i] = target.train_values[i] + noise(rng);
  }
  return out;
}

double rmse(const OpTree& candidate, const std::vector<double>& xs, const std::vector<double>& truth) {
  if (xs.size() != truth.size()) throw std::invalid_argument("point and value counts differ");
  if (xs.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = evaluate(candidate, xs[i]);
    if (!std::isfinite(v)) return kInf;
    double d = truth[i] - v;
    sum += d * d;
  }
  double r = std::sqrt(sum / static_cast<double>(xs.size()));
  return std::isfinite(r) ? r : kInf;
}

double rmse(const OpTree& candidate, const TargetSpec& target, const PointSet& points) {
  const std::vector<double>* truth = nullptr;
  if (points.xs == target.train.xs) {
    truth = &target.train_values;
  } else if (points.xs == target.interpolation.xs) {
    truth = &target.clean_interpolation;
  } else if (points.xs == target.extrapolation.xs) {
    truth = &target.clean_extrapolation;
  }
  if (truth) return rmse(candidate, points.xs, *truth);
  return rmse(candidate, points.xs, values_at(target.tree, points.xs));
}

PowerError dp_error(const LeadingPowers& achieved, const Condition& desired) {
  if (!achieved.defined()) return {kPowerSentinel, true};
  return {std::abs(desired.c0 - achieved.p0) + std::abs(desired.cinf - achieved.pinf), false};
}

PowerError dp_error(const OpTree& candidate, const Condition& desired) {
  return dp_error(leading_powers(candidate), desired);
}

PowerError dp_error(const std::optional<OpTree>& candidate, const Condition& desired) {
  if (!candidate) return {kPowerSentinel, true};
  return dp_error(*candidate, desired);
}

std::string_view to_string(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::data_only: return "data_only";
    case ObjectiveMode::pw_only: return "pw_only";
    case ObjectiveMode::data_plus_pw: return "data_plus_pw";
  }
  return "?";
}

ObjectiveMode objective_mode_from_string(std::string_view text) {
  if (text == "data_only") return ObjectiveMode::data_only;
  if (text == "pw_only") return ObjectiveMode::pw_only;
  if (text == "data_plus_pw") return ObjectiveMode::data_plus_pw;
  throw std::invalid_argument("unknown objective mode: " + std::string(text));
}

double objective(const std::optional<OpTree>& candidate, const TargetSpec& target, ObjectiveMode mode) {
  if (!candidate) return kInvalidPenalty;
  double data = 0;
  if (mode != ObjectiveMode::pw_only) {
    data = rmse(*candidate, target.train.xs, target.train_values);
    if (!std::isfinite(data)) return kInvalidPenalty;
  }
  if (mode == ObjectiveMode::data_only) return data;

  auto lp = leading_powers(*candidate);
  if (lp.status == LeadingPowers::Status::undefined_function) return kInvalidPenalty;
  return data + dp_error(lp, target.condition).value;
}

std::string_view to_string(EvalStatus status) {
  switch (status) {
    case EvalStatus::solved: return "solved";
    case EvalStatus::invalid: return "invalid";
    case EvalStatus::unsolved: return "unsolved";
  }
  return "?";
}

EvalReport classify(const std::optional<OpTree>& candidate, const TargetSpec& target) {
  EvalReport report;
  if (!candidate) {
    report.dg_train = report.dg_int = report.dg_ext = kInf;
    report.dp = {kPowerSentinel, true};
    report.status = EvalStatus::invalid;
    return report;
  }
  auto lp = leading_powers(*candidate);
  report.dp = dp_error(lp, target.condition);
  report.dg_train = rmse(*candidate, target.train.xs, target.train_values);
  report.dg_int = rmse(*candidate, target.interpolation.xs, target.clean_interpolation);
  report.dg_ext = rmse(*candidate, target.extrapolation.xs, target.clean_extrapolation);

  const bool finite = std::isfinite(report.dg_train) && std::isfinite(report.dg_int) &&
                      std::isfinite(report.dg_ext);
  if (!finite || lp.status == LeadingPowers::Status::undefined_function) {
    report.status = EvalStatus::invalid;
  } else if (report.dg_int < kSolvedTolerance && report.dg_ext < kSolvedTolerance &&
             !report.dp.sentinel && report.dp.value == 0) {
    report.status = EvalStatus::solved;
  } else {
    report.status = EvalStatus::unsolved;
  }
  return report;
}

}  // namespace asymreg
