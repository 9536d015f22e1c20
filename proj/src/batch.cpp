#include "asymreg/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "asymreg/parallel.hpp"

namespace asymreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr MethodName kMethodNames[] = {
    {Method::mcts, "mcts"}, {Method::mcts_pw_only, "mcts_pw_only"}, {Method::mcts_pw, "mcts_pw"},
    {Method::ng_mcts, "ng_mcts"}, {Method::ea, "ea"}, {Method::ea_pw, "ea_pw"},
};

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_or_inf(const Json& row, const char* field) {
  auto it = row.find(field);
  if (it == row.end() || it->is_null()) return kInf;
  return it->get<double>();
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "?";
}

Method method_from_string(std::string_view text) {
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), '-', '_');
  for (const auto& [method, name] : kMethodNames) {
    if (name == normalized) return method;
  }
  throw std::invalid_argument("unknown method: " + std::string(text));
}

ObjectiveMode method_mode(Method m) {
  switch (m) {
    case Method::mcts:
    case Method::ea: return ObjectiveMode::data_only;
    case Method::mcts_pw_only: return ObjectiveMode::pw_only;
    case Method::mcts_pw:
    case Method::ng_mcts:
    case Method::ea_pw: return ObjectiveMode::data_plus_pw;
  }
  return ObjectiveMode::data_only;
}

bool is_mcts(Method m) { return m != Method::ea && m != Method::ea_pw; }
bool uses_prior(Method m) { return m == Method::ng_mcts; }

std::uint64_t target_seed(std::uint64_t batch_seed, std::size_t index) { return mix_seed(batch_seed, index); }

TargetResult run_target(const std::string& target, const BatchConfig& config, std::uint64_t seed, Policy* prior) {
  TargetResult r;
  r.target = target;
  r.method = config.method;
  r.seed = seed;
  r.report.dg_train = r.report.dg_int = r.report.dg_ext = kInf;
  r.report.dp = {kPowerSentinel, true};

  std::optional<TargetSpec> spec;
  try {
    spec = TargetSpec::from_text(target);
  } catch (const std::exception& e) {
    r.error = std::string("invalid target: ") + e.what();
    return r;
  }
  r.condition = spec->condition;
  if (config.noise_sd > 0) spec = perturb_with_noise(*spec, config.noise_sd, mix_seed(seed, 0x6e6f697365ULL));

  SearchOutcome out;
  if (is_mcts(config.method)) {
    MctsConfig mc = config.mcts;
    mc.seed = seed;
    mc.mode = method_mode(config.method);
    RandomPolicy uniform;
    Policy& policy = uses_prior(config.method) && prior != nullptr ? *prior : static_cast<Policy&>(uniform);
    out = run_search(*spec, policy, mc);
  } else {
    EaConfig ec = config.ea;
    ec.seed = seed;
    ec.mode = method_mode(config.method);
    out = evolve(*spec, ec);
  }
  r.best_expr = out.best_expr;
  r.report = out.report;
  r.sims = out.simulations;
  r.evaluations = out.evaluations;
  r.error = out.failure;
  return r;
}

std::vector<TargetResult> run_batch(const std::vector<std::string>& targets, const BatchConfig& config,
                                    const PriorSource& prior) {
  std::vector<TargetResult> results(targets.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, targets.size()));
  std::vector<std::unique_ptr<Policy>> shared(workers);
  if (uses_prior(config.method) && prior.shared && !prior.per_target) {
    for (auto& p : shared) p = prior.shared();
  }
  parallel_for_workers(targets.size(), workers, [&](std::size_t w, std::size_t i) {
    const std::uint64_t seed = target_seed(config.seed, i);
    std::unique_ptr<Policy> own;
    Policy* policy = shared[w].get();
    if (uses_prior(config.method) && prior.per_target) {
      try {
        own = prior.per_target(parse_text(targets[i]));
        policy = own.get();
      } catch (const GrammarError&) {
        // run_target reports the unparsable target.
      }
    }
    results[i] = run_target(targets[i], config, seed, policy);
  });
  return results;
}

TargetResult evaluate_fixture(const std::string& target, const std::string& candidate, Method method) {
  TargetResult r;
  r.target = target;
  r.method = method;
  TargetSpec spec = TargetSpec::from_text(target);
  r.condition = spec.condition;
  ExprTree tree = parse_text(candidate);
  r.best_expr = render(tree);
  r.report = classify(to_optree(tree), spec);
  r.evaluations = 1;
  return r;
}

Json to_json(const TargetResult& r) {
  Json row = {
      {"target", r.target},
      {"method", std::string(to_string(r.method))},
      {"best_expr", r.best_expr},
      {"dg_train", finite_or_null(r.report.dg_train)},
      {"dg_int", finite_or_null(r.report.dg_int)},
      {"dg_ext", finite_or_null(r.report.dg_ext)},
      {"dp", r.report.dp.value},
      {"dp_sentinel", r.report.dp.sentinel},
      {"status", std::string(to_string(r.report.status))},
      {"sims", r.sims},
      {"evaluations", r.evaluations},
      {"seed", r.seed},
  };
  if (r.condition) {
    row["c0"] = r.condition->c0;
    row["cinf"] = r.condition->cinf;
    row["m"] = r.condition->complexity();
  } else {
    row["c0"] = row["cinf"] = row["m"] = nullptr;
  }
  if (r.error) row["error"] = *r.error;
  return row;
}

TargetResult result_from_json(const Json& row) {
  try {
    TargetResult r;
    r.target = row.at("target").get<std::string>();
    r.method = method_from_string(row.at("method").get<std::string>());
    r.best_expr = row.value("best_expr", "");
    r.report.dg_train = number_or_inf(row, "dg_train");
    r.report.dg_int = number_or_inf(row, "dg_int");
    r.report.dg_ext = number_or_inf(row, "dg_ext");
    r.report.dp = {row.at("dp").get<int>(), row.value("dp_sentinel", false)};
    const auto status = row.at("status").get<std::string>();
    if (status == "solved") {
      r.report.status = EvalStatus::solved;
    } else if (status == "unsolved") {
      r.report.status = EvalStatus::unsolved;
    } else if (status == "invalid") {
      r.report.status = EvalStatus::invalid;
    } else {
      throw DataError("unknown status " + status);
    }
    r.sims = row.value("sims", std::size_t{0});
    r.evaluations = row.value("evaluations", std::size_t{0});
    r.seed = row.value("seed", std::uint64_t{0});
    if (row.contains("c0") && !row["c0"].is_null()) r.condition = Condition{row["c0"].get<int>(), row["cinf"].get<int>()};
    if (row.contains("error")) r.error = row["error"].get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw DataError("malformed result row: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  const double a = values[n / 2 - 1];
  const double b = values[n / 2];
  if (std::isinf(b)) return std::isinf(a) ? a : b;
  return 0.5 * (a + b);
}

namespace {

MethodSummary summarize_over(const std::string& method, const std::vector<const TargetResult*>& rows,
                             const std::set<std::string>& hard, std::size_t unique_targets) {
  MethodSummary s;
  s.method = method;
  s.targets = rows.size();
  if (rows.empty()) return s;
  std::size_t solved = 0, invalid = 0;
  std::vector<double> train, inter, ext, dp;
  bool train_reported = true;
  for (const TargetResult* r : rows) {
    solved += r->report.status == EvalStatus::solved;
    invalid += r->report.status == EvalStatus::invalid;
    if (method_mode(r->method) == ObjectiveMode::pw_only) train_reported = false;
    if (!hard.count(r->target)) continue;
    train.push_back(r->report.dg_train);
    inter.push_back(r->report.dg_int);
    ext.push_back(r->report.dg_ext);
    dp.push_back(r->report.dp.value);
  }
  const auto n = static_cast<double>(rows.size());
  s.solved_pct = 100.0 * static_cast<double>(solved) / n;
  s.invalid_pct = 100.0 * static_cast<double>(invalid) / n;
  s.hard = hard.size();
  s.hard_pct = unique_targets == 0 ? 0 : 100.0 * static_cast<double>(hard.size()) / static_cast<double>(unique_targets);
  if (train_reported) s.median_dg_train = median(train);
  s.median_dg_int = median(inter);
  s.median_dg_ext = median(ext);
  s.median_dp = median(dp);
  return s;
}

}  // namespace

MethodSummary summarize(const std::vector<TargetResult>& results) {
  auto joined = join_summaries({results});
  if (joined.empty()) return MethodSummary{};
  return joined.front();
}

std::vector<MethodSummary> join_summaries(const std::vector<std::vector<TargetResult>>& per_method) {
  std::set<std::string> all, solved;
  for (const auto& results : per_method) {
    for (const auto& r : results) {
      // Unscorable targets count as invalid but are never hard.
      if (r.error) continue;
      all.insert(r.target);
      if (r.report.status == EvalStatus::solved) solved.insert(r.target);
    }
  }
  std::set<std::string> hard;
  std::set_difference(all.begin(), all.end(), solved.begin(), solved.end(), std::inserter(hard, hard.end()));

  std::vector<MethodSummary> out;
  for (const auto& results : per_method) {
    if (results.empty()) continue;
    std::map<std::string, std::vector<const TargetResult*>> by_method;
    std::vector<std::string> order;
    for (const auto& r : results) {
      std::string name(to_string(r.method));
      if (!by_method.count(name)) order.push_back(name);
      by_method[name].push_back(&r);
    }
    for (const auto& name : order) out.push_back(summarize_over(name, by_method[name], hard, all.size()));
  }
  return out;
}

Json to_json(const MethodSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v && std::isfinite(*v) ? Json(*v) : Json(nullptr); };
  return {{"method", s.method},
          {"targets", s.targets},
          {"solved_pct", s.solved_pct},
          {"invalid_pct", s.invalid_pct},
          {"hard_pct", s.hard_pct},
          {"hard", s.hard},
          {"median_dg_train", opt(s.median_dg_train)},
          {"median_dg_int", opt(s.median_dg_int)},
          {"median_dg_ext", opt(s.median_dg_ext)},
          {"median_dp", opt(s.median_dp)}};
}

}  // namespace asymreg
