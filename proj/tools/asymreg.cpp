// Command-line front end: dataset generation, analysis one-liners, batch
// search, policy evaluation, completion and reporting.

#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asymreg/batch.hpp"
#include "asymreg/corpus.hpp"
#include "asymreg/empirical_policy.hpp"
#include "asymreg/json_io.hpp"
#include "asymreg/metrics.hpp"
#include "asymreg/neural_client.hpp"
#include "asymreg/rational.hpp"
#include "asymreg/sampling.hpp"

namespace fs = std::filesystem;
using namespace asymreg;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kData = 4,
  kService = 5,
  kCheckFailed = 6,
  kLaunch = 7,
};

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, bad value)\n"
    "  3  file cannot be read or written\n"
    "  4  malformed input (expression, JSONL row, config)\n"
    "  5  policy service unavailable or protocol violation\n"
    "  6  fixture values do not reproduce\n"
    "  7  serve-policy could not start the service\n";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON config files: top-level keys set global options, nested objects set
// options of the subcommand with that name.
class ConfigJson : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      input >> j;
    } catch (const Json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static Json dump(const CLI::App* app, bool default_also) {
    Json j = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->results().size() == 1 ? Json(opt->results().front()) : Json(opt->results());
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      Json s = dump(sub, default_also);
      if (!s.empty()) j[sub->get_name()] = s;
    }
    return j;
  }

  static void collect(const Json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        item.inputs.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string scale = "desk";
};

// Effective option values of the app and the chosen subcommand.
Json effective_config(const CLI::App& app, const CLI::App& sub) {
  Json j = Json::object();
  auto add = [&](const CLI::App& a, Json& out) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        out[name] = r.size() == 1 ? Json(r.front()) : Json(r);
      } else if (!opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->get_lnames().empty() && opt->count() > 0) out[opt->get_name()] = opt->results();
    }
  };
  add(app, j);
  Json s = Json::object();
  add(sub, s);
  j[sub.get_name()] = s;
  return j;
}

void write_manifest(const fs::path& path, const CLI::App& app, const CLI::App& sub) {
  write_json(path, make_manifest(sub.get_name(), effective_config(app, sub)));
}

fs::path manifest_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

Condition parse_condition(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("condition must be C0,CINF: " + text);
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("condition must be two integers: " + text);
  }
}

std::vector<TrainingSequence> load_sequences(const std::string& path) {
  if (path.empty()) throw UsageError("empirical policies need --train FILE");
  std::vector<TrainingSequence> out;
  for (const auto& r : read_corpus(path)) {
    if (r.condition) out.push_back({r.rules, *r.condition});
  }
  return out;
}

struct PolicyOptions {
  std::string model = "nn";
  std::string train;
  std::string endpoint = "tcp://127.0.0.1:7070";
  bool abstain = false;
  double timeout_s = 30;
};

// Shared factory for every model except the per-target teacher.
PolicyFactory policy_factory(const PolicyOptions& o) {
  const std::string& m = o.model;
  if (m == "random" || m == "uniform") return [] { return random_policy(); };
  if (m == "nn" || m == "nnnc") {
    std::string endpoint = resolve_policy_endpoint(o.endpoint);
    auto timeout = std::chrono::milliseconds(static_cast<long>(o.timeout_s * 1000));
    return [endpoint, timeout] { return std::unique_ptr<Policy>(new NeuralPolicyClient(endpoint, timeout)); };
  }
  EmpiricalVariant variant;
  try {
    variant = EmpiricalVariant::parse(m);
  } catch (const std::exception&) {
    throw UsageError("unknown model: " + m);
  }
  auto sequences = load_sequences(o.train);
  auto index = std::make_shared<const EmpiricalIndex>(sequences, variant);
  auto unseen = o.abstain ? UnseenContext::abstain : UnseenContext::uniform;
  return [index, unseen] { return std::unique_ptr<Policy>(new EmpiricalPolicy(index, unseen)); };
}

std::vector<std::string> read_targets(const std::string& path, std::size_t limit) {
  std::vector<std::string> out;
  for (const auto& row : read_jsonl(path)) {
    if (row.contains("expr") && row["expr"].is_string()) {
      out.push_back(row["expr"].get<std::string>());
    } else if (row.contains("target") && row["target"].is_string()) {
      out.push_back(row["target"].get<std::string>());
    } else {
      throw DataError(path + ": row without \"expr\" or \"target\": " + row.dump());
    }
    if (limit > 0 && out.size() == limit) break;
  }
  return out;
}

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

std::string opt_fixed(const std::optional<double>& v, int decimals) { return v ? fixed(*v, decimals) : "--"; }

void print_summary(std::ostream& out, const std::vector<MethodSummary>& rows) {
  out << std::left << std::setw(14) << "method" << std::right << std::setw(8) << "targets" << std::setw(9)
      << "solved%" << std::setw(10) << "invalid%" << std::setw(8) << "hard%" << std::setw(10) << "dg_train"
      << std::setw(10) << "dg_int" << std::setw(10) << "dg_ext" << std::setw(6) << "dP" << "\n";
  for (const auto& s : rows) {
    out << std::left << std::setw(14) << s.method << std::right << std::setw(8) << s.targets << std::setw(9)
        << fixed(s.solved_pct, 2) << std::setw(10) << fixed(s.invalid_pct, 2) << std::setw(8)
        << fixed(s.hard_pct, 2) << std::setw(10) << opt_fixed(s.median_dg_train, 3) << std::setw(10)
        << opt_fixed(s.median_dg_int, 3) << std::setw(10) << opt_fixed(s.median_dg_ext, 3) << std::setw(6)
        << opt_fixed(s.median_dp, 1) << "\n";
  }
}

// ---------------------------------------------------------------------------

struct GenDatasetArgs {
  std::string out;
  std::optional<std::size_t> rounds, cap, holdout, max_rules;
};

int run_gen_dataset(const GenDatasetArgs& a, const Globals& g, const CLI::App& app, const CLI::App& sub) {
  DatasetConfig c = g.scale == "full" ? DatasetConfig::full() : DatasetConfig::desk();
  if (a.rounds) c.rounds = *a.rounds;
  if (a.cap) c.per_condition_cap = *a.cap;
  if (a.holdout) c.holdout_per_condition = *a.holdout;
  if (a.max_rules) c.max_rules = *a.max_rules;
  c.seed = g.seed;
  c.workers = g.workers;

  Dataset ds = build_dataset(c, [](const std::string& msg) { std::cerr << msg << "\n"; });
  const fs::path dir(a.out);
  write_corpus(dir / "train.jsonl", ds.train);
  write_corpus(dir / "validation.jsonl", ds.validation);
  write_corpus(dir / "holdout_m4.jsonl", ds.holdout_in_sample);
  for (const auto& [m, recs] : ds.holdout_by_complexity) {
    write_corpus(dir / ("holdout_m" + std::to_string(m) + ".jsonl"), recs);
  }

  Json stats;
  stats["train"] = to_json(length_stats(ds.train));
  stats["validation"] = to_json(length_stats(ds.validation));
  stats["holdout_m4"] = to_json(length_stats(ds.holdout_in_sample));
  for (const auto& [m, recs] : ds.holdout_by_complexity) {
    stats["holdout_m" + std::to_string(m)] = to_json(length_stats(recs));
  }
  Json rounds = Json::array();
  for (const auto& [size, median] : ds.round_sizes) rounds.push_back({{"pool", size}, {"median_length", median}});
  stats["rounds"] = rounds;
  Json shortfalls = Json::array();
  for (const auto& s : ds.shortfalls) {
    shortfalls.push_back({{"c0", s.condition.c0},
                          {"cinf", s.condition.cinf},
                          {"stage", s.stage},
                          {"available", s.available},
                          {"wanted", s.wanted}});
  }
  stats["shortfalls"] = shortfalls;
  write_json(dir / "stats.json", stats);
  write_manifest(dir / "manifest.json", app, sub);

  std::cout << "train " << ds.train.size() << "\nvalidation " << ds.validation.size() << "\nholdout_m4 "
            << ds.holdout_in_sample.size() << "\n";
  for (const auto& [m, recs] : ds.holdout_by_complexity) {
    std::cout << "holdout_m" << m << " " << recs.size() << "\n";
  }
  std::cout << "short pools " << ds.shortfalls.size() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
  std::string method;
  std::string holdout;
  std::string out;
  std::string fixtures;
  std::string prior = "nn";
  std::size_t limit = 0;
  std::size_t sims = 500;
  double c_puct = 50;
  std::size_t length_limit = kDefaultLengthLimit;
  std::string reward = "reciprocal";
  bool no_early_stop = false;
  std::size_t budget = 500;
  std::size_t population = 10;
  double noise_sd = 0;
  PolicyOptions policy;
};

// Scores quoted candidates; rows may carry expected values to check.
int run_fixtures(const SearchArgs& a, Method method, const CLI::App& app, const CLI::App& sub) {
  std::set<std::string> wanted;
  if (!a.holdout.empty()) {
    for (const auto& t : read_targets(a.holdout, 0)) wanted.insert(render(parse_text(t)));
  }
  std::vector<Json> out_rows;
  std::size_t checked = 0, failed = 0;
  std::cout << std::left << std::setw(10) << "label" << std::right << std::setw(10) << "dg_train" << std::setw(10)
            << "dg_int" << std::setw(10) << "dg_ext" << std::setw(6) << "dP" << std::setw(8) << "check"
            << "  candidate\n";
  for (const auto& row : read_jsonl(a.fixtures)) {
    if (!row.contains("target") || !row.contains("candidate")) {
      throw DataError(a.fixtures + ": fixture rows need \"target\" and \"candidate\"");
    }
    const auto target = row["target"].get<std::string>();
    if (!wanted.empty() && !wanted.count(render(parse_text(target)))) continue;
    if (row.contains("method") && method_from_string(row["method"].get<std::string>()) != method) continue;
    const auto candidate = row["candidate"].get<std::string>();
    const std::string label = row.value("label", row.value("method", std::string(to_string(method))));

    Json result;
    std::string check = "-";
    try {
      TargetResult r = evaluate_fixture(target, candidate, method);
      result = to_json(r);
      const auto powers = leading_powers(parse_text(candidate));
      if (powers.defined()) {
        result["p0"] = powers.p0;
        result["pinf"] = powers.pinf;
      }
      if (row.contains("expected")) {
        const double tol = row.value("tolerance", 0.01);
        bool ok = true;
        const Json& e = row["expected"];
        const Json decimals = row.value("decimals", Json::object());
        auto close = [&](const char* key, double actual) {
          if (!e.contains(key)) return;
          // Values printed with fewer decimals are compared at that precision.
          if (decimals.contains(key)) {
            const double scale = std::pow(10.0, decimals[key].get<int>());
            actual = std::round(actual * scale) / scale;
          }
          ok = ok && std::abs(actual - e[key].get<double>()) <= tol + 1e-12;
        };
        close("dg_train", r.report.dg_train);
        close("dg_int", r.report.dg_int);
        close("dg_ext", r.report.dg_ext);
        if (e.contains("dp")) ok = ok && r.report.dp.value == e["dp"].get<int>();
        if (e.contains("p0")) ok = ok && powers.defined() && powers.p0 == e["p0"].get<int>();
        if (e.contains("pinf")) ok = ok && powers.defined() && powers.pinf == e["pinf"].get<int>();
        if (e.contains("target_p0") && r.condition) ok = ok && r.condition->c0 == e["target_p0"].get<int>();
        if (e.contains("target_pinf") && r.condition) ok = ok && r.condition->cinf == e["target_pinf"].get<int>();
        check = ok ? "ok" : "FAIL";
        ++checked;
        failed += !ok;
      }
      std::cout << std::left << std::setw(10) << label << std::right << std::setw(10)
                << fixed(r.report.dg_train, 2) << std::setw(10) << fixed(r.report.dg_int, 2) << std::setw(10)
                << fixed(r.report.dg_ext, 2) << std::setw(6) << r.report.dp.value << std::setw(8) << check << "  "
                << r.best_expr << "\n";
    } catch (const std::invalid_argument& e) {
      result = {{"target", target}, {"method", std::string(to_string(method))}, {"error", e.what()}};
      std::cout << std::left << std::setw(10) << label << "  error: " << e.what() << "\n";
    }
    result["label"] = label;
    result["candidate"] = candidate;
    out_rows.push_back(result);
  }
  if (!a.out.empty()) {
    write_jsonl(a.out, out_rows);
    write_manifest(manifest_for(a.out), app, sub);
  }
  std::cerr << out_rows.size() << " fixtures, " << checked << " checked, " << failed << " failed\n";
  if (failed > 0) throw CheckFailed(std::to_string(failed) + " fixture rows do not reproduce");
  return kOk;
}

int run_search_cmd(const SearchArgs& a, const Globals& g, const CLI::App& app, const CLI::App& sub) {
  Method method;
  try {
    method = method_from_string(a.method);
  } catch (const std::exception&) {
    throw UsageError("unknown method: " + a.method);
  }
  if (!a.fixtures.empty()) return run_fixtures(a, method, app, sub);
  if (a.holdout.empty()) throw UsageError("search needs --holdout FILE (or --fixtures FILE)");

  BatchConfig c;
  c.method = method;
  c.seed = g.seed;
  c.workers = g.workers;
  c.noise_sd = a.noise_sd;
  c.mcts.simulations = a.sims;
  c.mcts.c_puct = a.c_puct;
  c.mcts.length_limit = a.length_limit;
  c.mcts.stop_on_perfect = !a.no_early_stop;
  if (a.reward == "exponential") {
    c.mcts.reward = RewardShape::exponential;
  } else if (a.reward != "reciprocal") {
    throw UsageError("unknown reward shape: " + a.reward);
  }
  c.ea.eval_budget = a.budget;
  c.ea.population = a.population;

  PriorSource prior;
  if (uses_prior(method)) {
    if (a.prior == "teacher") {
      prior.per_target = [](const ExprTree& t) { return std::unique_ptr<Policy>(new TeacherPolicy(to_rules(t))); };
    } else {
      PolicyOptions o = a.policy;
      o.model = a.prior;
      prior.shared = policy_factory(o);
    }
  }

  auto targets = read_targets(a.holdout, a.limit);
  auto results = run_batch(targets, c, prior);
  std::vector<Json> rows;
  for (const auto& r : results) rows.push_back(to_json(r));
  std::size_t errors = 0;
  for (const auto& r : results) {
    if (r.error) {
      ++errors;
      std::cerr << "target " << r.target << ": " << *r.error << "\n";
    }
  }
  if (a.out.empty()) {
    for (const auto& row : rows) std::cout << row.dump() << "\n";
  } else {
    write_jsonl(a.out, rows);
    write_manifest(manifest_for(a.out), app, sub);
    print_summary(std::cout, {summarize(results)});
  }
  if (errors > 0) std::cerr << errors << " of " << results.size() << " targets failed\n";
  // Results are written first so a lost service still leaves partial output.
  for (const auto& r : results) {
    if (r.error && r.error->rfind(kPolicyFailurePrefix, 0) == 0) throw ServiceUnavailable(*r.error);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvalPolicyArgs {
  PolicyOptions policy;
  bool grid = false;
  std::size_t k = 25;
  int bound = 9;
  std::size_t length_limit = kDefaultLengthLimit;
  std::string out;
};

int run_eval_policy(const EvalPolicyArgs& a, const Globals& g, const CLI::App& app, const CLI::App& sub) {
  PolicyFactory factory = policy_factory(a.policy);
  TrainingIndex training;
  if (!a.policy.train.empty()) training = TrainingIndex::of(read_corpus(a.policy.train));

  GridConfig gc;
  gc.k = a.k;
  gc.seed = g.seed;
  gc.bound = a.bound;
  gc.length_limit = a.length_limit;
  gc.workers = g.workers;
  if (!a.grid) gc.only = conditions_up_to(4);
  ConditionGrid grid = evaluate_grid(factory, training, gc);
  ModelReport r = aggregate(a.policy.model, grid);

  Json report = {{"model", r.model},
                 {"k", a.k},
                 {"in_sample",
                  {{"success_pct", r.in_success},
                   {"syntactic_novelty_pct", r.in_syntactic},
                   {"semantic_novelty_pct", r.in_semantic},
                   {"mean_l1", r.in_mean_l1}}},
                 {"out_of_sample",
                  {{"successes", r.out_success},
                   {"syntactic_novel", r.out_syntactic},
                   {"semantic_novel", r.out_semantic},
                   {"conditions_with_success", r.out_conditions_with_success}}}};
  Json by_m = Json::object();
  for (const auto& [m, l1] : r.mean_l1_by_complexity) by_m[std::to_string(m)] = l1;
  report["mean_l1_by_complexity"] = by_m;

  if (!a.out.empty()) {
    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::ofstream csv(dir / "grid.csv");
    if (!csv) throw IoError("cannot write " + (dir / "grid.csv").string());
    write_grid_csv(grid, csv);
    write_json(dir / "report.json", report);
    write_manifest(dir / "manifest.json", app, sub);
  }
  std::cout << report.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct CompleteArgs {
  PolicyOptions policy;
  std::string template_text;
  std::string condition;
  std::size_t n = 1000;
  std::size_t top = 0;
  std::size_t length_limit = kDefaultLengthLimit;
};

int run_complete(const CompleteArgs& a, const Globals& g) {
  RuleSeq prefix = parse_template(a.template_text);
  Condition c = parse_condition(a.condition);
  auto policy = policy_factory(a.policy)();
  auto completions = sample_from_prefix(*policy, prefix, c, a.n, g.seed, a.length_limit);
  std::size_t shown = 0;
  for (const auto& comp : completions) {
    if (a.top > 0 && shown++ == a.top) break;
    std::string match = "-";
    if (comp.complete) {
      auto cond = condition_of(parse_text(comp.expression));
      match = cond && *cond == c ? "match" : "no";
    }
    std::cout << fixed(100 * comp.frequency, 1) << "%\t" << match << "\t" << comp.expression << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> join;
  std::vector<std::string> files;
  std::string out;
};

std::vector<TargetResult> load_results(const std::string& path) {
  std::vector<TargetResult> out;
  for (const auto& row : read_jsonl(path)) out.push_back(result_from_json(row));
  return out;
}

int run_report(const ReportArgs& a, const CLI::App& app, const CLI::App& sub) {
  if (a.join.empty() && a.files.empty()) throw UsageError("report needs result files (or --join FILES)");
  std::vector<MethodSummary> rows;
  if (!a.join.empty()) {
    std::vector<std::vector<TargetResult>> per_method;
    for (const auto& f : a.join) per_method.push_back(load_results(f));
    rows = join_summaries(per_method);
  }
  for (const auto& f : a.files) rows.push_back(summarize(load_results(f)));
  print_summary(std::cout, rows);
  if (!a.out.empty()) {
    Json j = Json::array();
    for (const auto& r : rows) j.push_back(to_json(r));
    write_json(a.out, j);
    write_manifest(manifest_for(a.out), app, sub);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int run_serve_policy(const std::vector<std::string>& passthrough) {
  const char* python = std::getenv("ASYMREG_PYTHON");
  std::string interpreter = python && *python ? python : "python3";
  std::vector<std::string> args{interpreter, "-m", "asymreg_policy", "serve"};
  args.insert(args.end(), passthrough.begin(), passthrough.end());
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  argv.push_back(nullptr);
  std::cout.flush();
  ::execvp(argv[0], argv.data());
  std::cerr << "asymreg: cannot start " << interpreter << ": " << std::strerror(errno) << "\n";
  return kLaunch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic regression with asymptotic constraints.", "asymreg"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<ConfigJson>());
  app.set_config("--config", "", "JSON file with option values; nested objects per subcommand");
  app.set_version_flag("--version", ASYMREG_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--scale", g.scale, "Preset sizes")->check(CLI::IsMember({"desk", "full"}));

  auto add_policy_options = [](CLI::App* sub, PolicyOptions& p, bool with_model) {
    if (with_model) {
      sub->add_option("--model", p.model, "nn, nnnc, random, fh, fhnc, lh:L or lhnc:L");
    }
    sub->add_option("--train", p.train, "Training corpus JSONL (empirical models, novelty)");
    sub->add_option("--endpoint", p.endpoint,
                    std::string("Policy service address; ") + kPolicyEndpointEnv + " overrides it");
    sub->add_flag("--abstain", p.abstain, "Empirical models stop on unseen contexts");
    sub->add_option("--timeout", p.timeout_s, "Policy service reply timeout in seconds");
  };

  GenDatasetArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Build the training, validation and holdout corpora");
  gen_cmd->fallthrough();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--rounds", gen.rounds, "Augmentation rounds");
  gen_cmd->add_option("--cap", gen.cap, "Expressions per in-sample condition");
  gen_cmd->add_option("--holdout", gen.holdout, "Holdout expressions per condition");
  gen_cmd->add_option("--max-rules", gen.max_rules, "Rule budget of the initial enumeration");

  std::size_t space_n = 0;
  auto* space_cmd = app.add_subcommand("space-size", "Number of expressions within N production rules");
  space_cmd->add_option("N", space_n, "Rule budget")->required()->check(CLI::PositiveNumber);

  std::string lp_expr;
  auto* lp_cmd = app.add_subcommand("leading-power", "Leading powers at 0 and infinity");
  lp_cmd->add_option("EXPR", lp_expr, "Expression")->required();

  std::string canon_expr;
  auto* canon_cmd = app.add_subcommand("canonical", "Canonical key of the simplified rational function");
  canon_cmd->add_option("EXPR", canon_expr, "Expression")->required();

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Symbolic regression over a holdout set");
  search_cmd->fallthrough();
  search_cmd->add_option("--method", search.method, "mcts, ng-mcts, mcts-pw, mcts-pw-only, ea or ea-pw")
      ->required();
  search_cmd->add_option("--holdout", search.holdout, "Targets JSONL (\"expr\" or \"target\" per row)");
  search_cmd->add_option("--out", search.out, "Results JSONL (stdout when omitted)");
  search_cmd->add_option("--fixtures", search.fixtures,
                         "Score candidate expressions from this JSONL instead of searching");
  search_cmd->add_option("--prior", search.prior, "NG-MCTS prior: nn, nnnc, teacher, random, fh, fhnc, lh:L, lhnc:L");
  search_cmd->add_option("--limit", search.limit, "Use only the first N targets");
  search_cmd->add_option("--sims", search.sims, "MCTS simulations per target");
  search_cmd->add_option("--c-puct", search.c_puct, "PUCT exploration constant");
  search_cmd->add_option("--length-limit", search.length_limit, "Maximum rules per expression");
  search_cmd->add_option("--reward", search.reward, "reciprocal or exponential");
  search_cmd->add_flag("--no-early-stop", search.no_early_stop, "Keep searching after a perfect score");
  search_cmd->add_option("--budget", search.budget, "EA objective evaluations per target");
  search_cmd->add_option("--population", search.population, "EA population size");
  search_cmd->add_option("--noise-sd", search.noise_sd, "Gaussian noise on training values")
      ->check(CLI::NonNegativeNumber);
  add_policy_options(search_cmd, search.policy, false);

  EvalPolicyArgs evalp;
  auto* eval_cmd = app.add_subcommand("eval-policy", "Conditional generation metrics of a policy");
  eval_cmd->fallthrough();
  add_policy_options(eval_cmd, evalp.policy, true);
  eval_cmd->add_flag("--grid", evalp.grid, "All conditions with |c0|, |cinf| <= bound (else M <= 4 only)");
  eval_cmd->add_option("--k", evalp.k, "Expressions per condition");
  eval_cmd->add_option("--bound", evalp.bound, "Grid half-width");
  eval_cmd->add_option("--length-limit", evalp.length_limit, "Maximum rules per expression");
  eval_cmd->add_option("--out", evalp.out, "Directory for grid.csv, report.json and manifest.json");

  CompleteArgs comp;
  auto* comp_cmd = app.add_subcommand("complete", "Complete a template such as \"1 / ? - ?\"");
  comp_cmd->fallthrough();
  add_policy_options(comp_cmd, comp.policy, true);
  comp_cmd->add_option("--template", comp.template_text, "Template with ? for open slots")->required();
  comp_cmd->add_option("--condition", comp.condition, "Desired C0,CINF")->required();
  comp_cmd->add_option("-n", comp.n, "Number of samples");
  comp_cmd->add_option("--top", comp.top, "Print only the most frequent K");
  comp_cmd->add_option("--length-limit", comp.length_limit, "Maximum rules per expression");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summaries of search results");
  report_cmd->add_option("--join", report.join, "Result files of several methods; hard = solved by none")
      ->expected(1, -1);
  report_cmd->add_option("FILES", report.files, "Result files summarized separately");
  report_cmd->add_option("--out", report.out, "Summary JSON");

  std::vector<std::string> serve_args;
  auto* serve_cmd = app.add_subcommand("serve-policy", "Start the neural policy service; arguments pass through");
  serve_cmd->prefix_command();
  serve_cmd->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kIo;
  } catch (const CLI::ConversionError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen_cmd) return run_gen_dataset(gen, g, app, *gen_cmd);
    if (*space_cmd) {
      std::cout << space_size(space_n) << "\n";
      return kOk;
    }
    if (*lp_cmd) {
      auto p = leading_powers(parse_text(lp_expr));
      if (p.status == LeadingPowers::Status::zero_function) {
        std::cout << "zero function\n";
      } else if (p.status == LeadingPowers::Status::undefined_function) {
        std::cout << "undefined function\n";
      } else {
        std::cout << "p0=" << p.p0 << " pinf=" << p.pinf << "\n";
      }
      return kOk;
    }
    if (*canon_cmd) {
      std::cout << canonicalize(parse_text(canon_expr)).str() << "\n";
      return kOk;
    }
    if (*search_cmd) return run_search_cmd(search, g, app, *search_cmd);
    if (*eval_cmd) return run_eval_policy(evalp, g, app, *eval_cmd);
    if (*comp_cmd) return run_complete(comp, g);
    if (*report_cmd) return run_report(report, app, *report_cmd);
    if (*serve_cmd) return run_serve_policy(serve_cmd->remaining());
  } catch (const UsageError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kIo;
  } catch (const PolicyError& e) {
    std::cerr << "asymreg: policy service: " << e.what() << "\n";
    return kService;
  } catch (const CheckFailed& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const DataError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kData;
  } catch (const ParseError& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "asymreg: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "asymreg: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
