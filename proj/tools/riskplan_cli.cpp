// riskplan command-line front end.
//
// Exit codes: 0 success, 2 bad input, 3 no feasible path, 4 optimizer failure,
// 1 anything else.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskplan/export.hpp"
#include "riskplan/scenario.hpp"
#include "riskplan/search.hpp"
#include "riskplan/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace riskplan;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kManifestName = "manifest.json";

enum Exit { kOk = 0, kFailure = 1, kBadInput = 2, kNoPath = 3, kOptimizer = 4 };

/// Everything that determines a command's data outputs.
struct Inputs {
  std::string scenario;
  std::string family = "crossing";
  std::optional<std::uint64_t> seed;
  std::string pipeline = "full";
  int trials = 40;
  std::vector<std::string> overrides;
  double sample_dt = 0.05;
  bool moving = false;
  int width = 50;
  int height = 50;
  int n_static = 12;
  int n_risky = 2;
};

json inputs_to_json(const Inputs& in) {
  json j;
  j["scenario"] = in.scenario;
  j["family"] = in.family;
  j["seed"] = in.seed ? json(*in.seed) : json(nullptr);
  j["pipeline"] = in.pipeline;
  j["trials"] = in.trials;
  j["overrides"] = in.overrides;
  j["sample_dt"] = in.sample_dt;
  j["moving"] = in.moving;
  j["width"] = in.width;
  j["height"] = in.height;
  j["static"] = in.n_static;
  j["risky"] = in.n_risky;
  return j;
}

Inputs inputs_from_json(const json& j) {
  Inputs in;
  try {
    in.scenario = j.at("scenario").get<std::string>();
    in.family = j.at("family").get<std::string>();
    if (!j.at("seed").is_null()) in.seed = j.at("seed").get<std::uint64_t>();
    in.pipeline = j.at("pipeline").get<std::string>();
    in.trials = j.at("trials").get<int>();
    in.overrides = j.at("overrides").get<std::vector<std::string>>();
    in.sample_dt = j.at("sample_dt").get<double>();
    in.moving = j.at("moving").get<bool>();
    in.width = j.at("width").get<int>();
    in.height = j.at("height").get<int>();
    in.n_static = j.at("static").get<int>();
    in.n_risky = j.at("risky").get<int>();
  } catch (const json::exception& e) {
    throw InputError(std::string("$.inputs: ") + e.what());
  }
  return in;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw InputError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Applies "a.b.0.c=value" overrides to a scenario document. Values are parsed
/// as JSON when possible and taken as strings otherwise.
void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("override '" + ov + "': expected path=value");
    const std::string path = ov.substr(0, eq);
    const std::string text = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json* node = &doc;
    std::stringstream ss(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ss, key, '.')) keys.push_back(key);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::string& k = keys[i];
      if (k.empty()) throw InputError("override '" + ov + "': empty path segment");
      if (node->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(k);
        } catch (const std::exception&) {
          throw InputError("override '" + ov + "': '" + k + "' is not an array index");
        }
        if (idx >= node->size()) throw InputError("override '" + ov + "': index " + k + " out of range");
        node = &(*node)[idx];
      } else if (node->is_object()) {
        node = &(*node)[k];
      } else {
        throw InputError("override '" + ov + "': '" + k + "' is below a scalar");
      }
    }
    *node = std::move(value);
  }
}

ScenarioConfig with_overrides(const ScenarioConfig& cfg, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return cfg;
  json doc = json::parse(to_json(cfg));
  apply_overrides(doc, overrides);
  return from_json(doc.dump());
}

ScenarioConfig load_configured(const Inputs& in) {
  if (in.scenario.empty()) throw InputError("--scenario is required");
  json doc;
  try {
    doc = json::parse(read_file(in.scenario));
  } catch (const json::parse_error& e) {
    throw InputError(std::string("$: malformed document: ") + e.what());
  }
  apply_overrides(doc, in.overrides);
  ScenarioConfig cfg = from_json(doc.dump());
  if (in.seed) cfg.seed = *in.seed;
  validate(cfg);
  return cfg;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

json params_json(const PlannerParams& p) {
  json j = json::object();
  for (const auto& [k, v] : param_entries(p)) {
    if (is_flag_param(k)) {
      j[k] = v != 0.0;
    } else {
      j[k] = quantize(v);
    }
  }
  return j;
}

class Output {
 public:
  Output(fs::path dir, std::string command, const Inputs& in) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    manifest_["tool"] = "riskplan";
    manifest_["version"] = kVersion;
    manifest_["command"] = std::move(command);
    manifest_["inputs"] = inputs_to_json(in);
    manifest_["outputs"] = json::array();
  }

  /// Opens a data file in the output directory and records it in the manifest.
  /// CSV files start with a comment naming the manifest.
  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
    if (name.ends_with(".csv")) os << "# manifest: " << kManifestName << '\n';
    manifest_["outputs"].push_back(name);
    return os;
  }

  json& manifest() { return manifest_; }
  const fs::path& dir() const { return dir_; }

  void finish() {
    manifest_["created_utc"] = utc_now();
    std::ofstream os(dir_ / kManifestName, std::ios::binary);
    os << manifest_.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  json manifest_;
};

void record_scenario(Output& out, const ScenarioConfig& cfg) {
  const std::string doc = to_json(cfg);
  out.manifest()["scenario_hash"] = hex64(fnv1a(doc));
  out.manifest()["params"] = params_json(cfg.params);
  out.manifest()["seeds"] = json::array({cfg.seed});
}

PlanOutcome plan_static(const ScenarioConfig& cfg) {
  SimOptions opts;
  opts.horizon = 1 << 20;
  return plan_once(cfg, initial_state(cfg), Pipeline::Full, opts);
}

// --- commands ---------------------------------------------------------------

int cmd_plan(const Inputs& in, const fs::path& dir) {
  const ScenarioConfig cfg = load_configured(in);
  const PlanOutcome plan = plan_static(cfg);
  Output out(dir, "plan", in);
  record_scenario(out, cfg);
  {
    auto os = out.open("path.csv");
    write_path_csv(os, plan.path, cfg.map.resolution);
  }
  {
    auto os = out.open("trajectory.csv");
    write_trajectory_csv(os, plan.traj, in.sample_dt, plan.report.final_terms);
  }
  out.manifest()["optimizer"] = {{"iterations", plan.report.iterations},
                                 {"termination", plan.report.termination}};
  out.finish();
  std::cout << "path: " << plan.path.cells.size() << " cells, length " << format_number(plan.path.length) << '\n'
            << "trajectory: " << plan.traj.size() << " control points, J " << format_number(plan.report.final_terms.total)
            << " after " << plan.report.iterations << " iterations (" << plan.report.termination << ")\n";
  return kOk;
}

int cmd_export_traj(const Inputs& in, const fs::path& dir) {
  const ScenarioConfig cfg = load_configured(in);
  const PlanOutcome plan = plan_static(cfg);
  Output out(dir, "export-traj", in);
  record_scenario(out, cfg);
  {
    auto os = out.open("trajectory.csv");
    write_trajectory_csv(os, plan.traj, in.sample_dt, plan.report.final_terms);
  }
  out.finish();
  std::cout << "trajectory: " << plan.traj.size() << " control points, duration "
            << format_number(plan.traj.duration()) << " s\n";
  return kOk;
}

int cmd_export_field(const Inputs& in, const fs::path& dir) {
  const ScenarioConfig cfg = load_configured(in);
  const RiskModel model = RiskModel::from(cfg.params, cfg.map.resolution);
  Output out(dir, "export-field", in);
  record_scenario(out, cfg);
  {
    const GridMap grid = cfg.grid();
    auto os = out.open("field_static.csv");
    write_field_csv(os, bake_risk_grid(grid, cfg.obstacles, model));
  }
  if (in.moving) {
    std::vector<Obstacle> obstacles = cfg.obstacles;
    for (auto& o : obstacles) {
      if (o.trigger) o.velocity = o.trigger->post_velocity;
    }
    GridMap grid(cfg.map.width, cfg.map.height, cfg.map.resolution);
    grid.rasterize(obstacles);
    auto os = out.open("field_moving.csv");
    write_field_csv(os, bake_risk_grid(grid, obstacles, model));
  }
  out.finish();
  std::cout << "wrote " << out.manifest()["outputs"].size() << " field file(s) to " << dir.string() << '\n';
  return kOk;
}

int cmd_compare(const Inputs& in, const fs::path&) {
  const ScenarioConfig cfg = load_configured(in);
  const GridMap grid = cfg.grid();
  const RiskGrid risk = bake_risk_grid(grid, cfg.obstacles, RiskModel::from(cfg.params, cfg.map.resolution));

  auto row = [&](const char* name, auto&& search) {
    std::cout << std::left << std::setw(10) << name;
    try {
      const Path p = search();
      const PathMetrics m = path_metrics(p, grid, cfg.obstacles);
      std::cout << std::setw(12) << format_number(m.length) << std::setw(16)
                << format_number(m.min_high_risk_clearance) << p.expansions << '\n';
      return true;
    } catch (const NoPathError&) {
      std::cout << std::setw(12) << "fail" << std::setw(16) << "-" << "-\n";
      return false;
    }
  };
  std::cout << std::left << std::setw(10) << "planner" << std::setw(12) << "length" << std::setw(16)
            << "min_clearance" << "expansions\n";
  const bool a = row("A*", [&] { return astar_baseline(grid, cfg.start, cfg.goal); });
  const bool r = row("R-A*", [&] {
    return r_astar(grid, risk, cfg.obstacles, cfg.start, cfg.goal, SearchParams::from(cfg.params));
  });
  return a || r ? kOk : kNoPath;
}

int cmd_simulate(const Inputs& in, const fs::path& dir) {
  const ScenarioConfig cfg = load_configured(in);
  const Pipeline pipeline = parse_pipeline(in.pipeline);
  const TrialResult r = run_trial(cfg, pipeline);
  Output out(dir, "simulate", in);
  record_scenario(out, cfg);
  {
    auto os = out.open("trials.csv");
    write_trials_csv(os, {r});
  }
  {
    auto os = out.open("timing.csv");
    write_timing_csv(os, {r});
  }
  out.finish();
  std::cout << to_string(pipeline) << ": " << (r.success ? "success" : "failure");
  if (!r.reason.empty()) std::cout << " (" << r.reason << ')';
  std::cout << ", flight " << format_number(r.flight_s) << " s, path " << format_number(r.path_length)
            << ", min clearance " << format_number(r.min_clearance) << '\n';
  return kOk;
}

int cmd_batch(const Inputs& in, const fs::path& dir, int jobs, bool show_timing) {
  std::vector<Pipeline> pipelines;
  if (in.pipeline == "all") {
    pipelines = {Pipeline::Full, Pipeline::SearchOnly, Pipeline::RiskDisabled};
  } else {
    pipelines = {parse_pipeline(in.pipeline)};
  }
  if (in.trials < 0) throw InputError("--trials must be >= 0");

  ScenarioSource source;
  if (!in.scenario.empty()) {
    const ScenarioConfig base = load_configured(in);
    source = [base](std::uint64_t seed) {
      ScenarioConfig c = base;
      c.seed = seed;
      return c;
    };
  } else {
    const Family family = parse_family(in.family);
    const auto overrides = in.overrides;
    source = [family, overrides](std::uint64_t seed) {
      return with_overrides(make_family_scenario(family, seed), overrides);
    };
    source(0);  // surface bad overrides as input errors before any trial runs
  }
  const std::uint64_t base_seed = in.seed.value_or(1);

  Output out(dir, "batch", in);
  std::string all_docs;
  json seeds = json::array();
  for (int i = 0; i < in.trials; ++i) {
    const auto s = base_seed + static_cast<std::uint64_t>(i);
    all_docs += to_json(source(s));
    seeds.push_back(s);
  }
  out.manifest()["scenario_hash"] = hex64(fnv1a(all_docs));
  out.manifest()["params"] = params_json(source(base_seed).params);
  out.manifest()["seeds"] = seeds;

  std::vector<TrialResult> rows;
  json summary = json::object();
  summary["manifest"] = kManifestName;
  summary["pipelines"] = json::array();
  json timing = json::object();

  std::cout << std::left << std::setw(16) << "pipeline" << std::setw(8) << "trials" << std::setw(14)
            << "success_rate" << std::setw(12) << "collisions" << std::setw(16) << "mean_flight_s";
  if (show_timing) std::cout << "mean_planning_ms";
  std::cout << '\n';
  for (const Pipeline p : pipelines) {
    const BatchResult b = run_batch(source, p, in.trials, base_seed, {}, jobs);
    int collisions = 0;
    for (const auto& t : b.trials) collisions += t.collision_time ? 1 : 0;
    rows.insert(rows.end(), b.trials.begin(), b.trials.end());
    summary["pipelines"].push_back({{"pipeline", std::string(to_string(p))},
                                    {"trials", in.trials},
                                    {"success_rate", quantize(b.success_rate)},
                                    {"collisions", collisions},
                                    {"mean_flight_s", quantize(b.mean_flight_s)}});
    timing[std::string(to_string(p))] = {{"mean_planning_ms", b.mean_planning_ms}};
    std::cout << std::left << std::setw(16) << to_string(p) << std::setw(8) << in.trials << std::setw(14)
              << format_number(b.success_rate) << std::setw(12) << collisions << std::setw(16)
              << format_number(b.mean_flight_s);
    if (show_timing) std::cout << format_number(b.mean_planning_ms);
    std::cout << '\n';
  }
  {
    auto os = out.open("trials.csv");
    write_trials_csv(os, rows);
  }
  {
    auto os = out.open("timing.csv");
    write_timing_csv(os, rows);
  }
  {
    auto os = out.open("summary.json");
    os << summary.dump(2) << '\n';
  }
  out.manifest()["timing"] = timing;
  out.finish();
  return kOk;
}

int cmd_gen_map(const Inputs& in, const fs::path& dir, const std::string& out_file) {
  const std::uint64_t seed = in.seed.value_or(0);
  ScenarioConfig cfg;
  if (in.family == "random" || in.family.empty()) {
    cfg = generate_random_map(in.width, in.height, in.n_static, in.n_risky, seed);
  } else {
    cfg = make_family_scenario(parse_family(in.family), seed);
  }
  cfg = with_overrides(cfg, in.overrides);
  const fs::path target = out_file.empty() ? dir / "scenario.json" : fs::path(out_file);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  save_scenario(cfg, target);
  std::cout << target.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware grid search and B-spline trajectory planning"};
  app.set_version_flag("--version", std::string("riskplan ") + kVersion);
  app.require_subcommand(1);

  Inputs in;
  std::string out_dir = ".";
  std::string manifest;
  std::string out_file;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool show_timing = false;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* s = sub->add_option("--scenario", in.scenario, "scenario file (JSON)");
    if (needs_scenario) s->required();
    sub->add_option("--seed", seed, "seed (scenario seed, or first trial seed for batch)");
    sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    sub->add_option("overrides", in.overrides, "dotted-path overrides such as params.lambda=5");
  };

  auto* plan = app.add_subcommand("plan", "search and optimize once; write path, trajectory and manifest");
  common(plan, true);
  plan->add_option("--sample-dt", in.sample_dt, "trajectory sampling interval [s]")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "run one closed-loop trial");
  common(simulate, true);
  simulate->add_option("--pipeline", in.pipeline, "full | search_only | risk_disabled")->capture_default_str();

  auto* batch = app.add_subcommand("batch", "run seeded trials and print a success-rate table");
  common(batch, false);
  batch->add_option("--family", in.family, "crossing | occluded | random (ignored with --scenario)")
      ->capture_default_str();
  batch->add_option("--pipeline", in.pipeline, "full | search_only | risk_disabled | all")->capture_default_str();
  batch->add_option("--trials", in.trials, "number of trials per pipeline")->capture_default_str();
  batch->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  batch->add_option("--manifest", manifest, "re-run with the inputs recorded in a manifest");
  batch->add_flag("--show-timing", show_timing, "add the wall-clock planning column");

  auto* compare = app.add_subcommand("compare", "A* and R-A* on the same map");
  common(compare, true);

  auto* field = app.add_subcommand("export-field", "dump the baked risk field");
  common(field, true);
  field->add_flag("--moving", in.moving, "also dump the field with every trigger fired");

  auto* traj = app.add_subcommand("export-traj", "dump the sampled optimized trajectory");
  common(traj, true);
  traj->add_option("--sample-dt", in.sample_dt, "sampling interval [s]")->capture_default_str();

  auto* gen = app.add_subcommand("gen-map", "write a generated scenario");
  gen->add_option("--family", in.family, "random | crossing | occluded")->default_val("random");
  gen->add_option("--width", in.width)->capture_default_str();
  gen->add_option("--height", in.height)->capture_default_str();
  gen->add_option("--static", in.n_static, "stationary structures")->capture_default_str();
  gen->add_option("--risky", in.n_risky, "temporarily static obstacles")->capture_default_str();
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_file, "output file (default <out-dir>/scenario.json)");
  gen->add_option("--out-dir", out_dir)->capture_default_str();
  gen->add_option("overrides", in.overrides, "dotted-path overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) in.seed = seed;
  }

  try {
    const fs::path dir(out_dir);
    if (*plan) return cmd_plan(in, dir);
    if (*simulate) return cmd_simulate(in, dir);
    if (*batch) {
      if (!manifest.empty()) {
        json m;
        try {
          m = json::parse(read_file(manifest));
        } catch (const json::parse_error& e) {
          throw InputError(std::string("$: malformed manifest: ") + e.what());
        }
        if (!m.contains("inputs")) throw InputError("$.inputs: missing");
        in = inputs_from_json(m["inputs"]);
      }
      return cmd_batch(in, dir, jobs, show_timing);
    }
    if (*compare) return cmd_compare(in, dir);
    if (*field) return cmd_export_field(in, dir);
    if (*traj) return cmd_export_traj(in, dir);
    if (*gen) return cmd_gen_map(in, dir, out_file);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const NoPathError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoPath;
  } catch (const OptimizerError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOptimizer;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
