// Batch front end: solve recommendation policies, replay them through the
// queue simulator, sweep compliance parameters, and generate synthetic
// schedules.  Every run drops a manifest.json with input digests and the
// effective configuration so results can be reproduced byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "slotrec/cc_model.hpp"
#include "slotrec/det_model.hpp"
#include "slotrec/leadtime.hpp"
#include "slotrec/queueing.hpp"
#include "slotrec/schedule.hpp"
#include "slotrec/sensitivity.hpp"
#include "slotrec/simulate.hpp"

namespace {

using namespace slotrec;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

// ---------------------------------------------------------------------------
// Config file: flat `key=value` lines, '#' comments.  Values become option
// defaults, so command-line flags always win.

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = strip(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = strip(t.substr(0, eq));
    std::string value = strip(t.substr(eq + 1));
    if (key.empty()) throw InputError(path + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

class Defaults {
 public:
  explicit Defaults(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  double num(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : csv::parse_double(it->second, "config " + key, 0);
  }
  long integer(const std::string& key, long fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : csv::parse_long(it->second, "config " + key, 0);
  }
  std::string text(const std::string& key, std::string fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? std::move(fallback) : it->second;
  }
  bool flag(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw InputError("config " + key + ": expected true/false");
  }

 private:
  std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------------------------
// Shared model options and assembly.

struct ModelOptions {
  std::string schedule_file;
  long slot_minutes = 15;
  long num_slots = 112;
  long grid_origin = 0;  // minutes past midnight of slot 0
  long window_len = 16;
  double capacity = 800.0;
  std::string capacity_file;
  double lead_location = 64.0;
  double lead_scale = 30.0;
  double lead_shape = 3.0;
  std::string beta_file;
  long mean_lead = 0;  // 0: derive from the lead-time model
  double mu = 0.7;
  double sigma = 0.2;
  std::string compliance_file;
  double gamma = 0.01;
};

void add_grid_options(CLI::App* cmd, ModelOptions& m, const Defaults& d) {
  m.slot_minutes = d.integer("slot-minutes", m.slot_minutes);
  m.num_slots = d.integer("num-slots", m.num_slots);
  m.grid_origin = d.integer("grid-origin", m.grid_origin);
  m.window_len = d.integer("window-len", m.window_len);
  cmd->add_option("--slot-minutes", m.slot_minutes, "Slot length in minutes");
  cmd->add_option("--num-slots", m.num_slots, "Number of slots in the day grid");
  cmd->add_option("--grid-origin", m.grid_origin, "Wall-clock minutes of slot 0");
  cmd->add_option("--window-len", m.window_len, "Recommendation window length in slots");
}

void add_model_options(CLI::App* cmd, ModelOptions& m, const Defaults& d, bool need_schedule) {
  m.schedule_file = d.text("schedule", m.schedule_file);
  m.capacity = d.num("capacity", m.capacity);
  m.capacity_file = d.text("capacity-file", m.capacity_file);
  m.lead_location = d.num("lead-location", m.lead_location);
  m.lead_scale = d.num("lead-scale", m.lead_scale);
  m.lead_shape = d.num("lead-shape", m.lead_shape);
  m.beta_file = d.text("beta-file", m.beta_file);
  m.mean_lead = d.integer("mean-lead", m.mean_lead);
  m.mu = d.num("mu", m.mu);
  m.sigma = d.num("sigma", m.sigma);
  m.compliance_file = d.text("compliance-file", m.compliance_file);
  m.gamma = d.num("gamma", m.gamma);

  add_grid_options(cmd, m, d);
  auto* sched = cmd->add_option("--schedule", m.schedule_file, "Flight schedule CSV");
  if (need_schedule && m.schedule_file.empty()) sched->required();
  cmd->add_option("--capacity", m.capacity, "Checkpoint throughput per slot");
  cmd->add_option("--capacity-file", m.capacity_file, "Per-slot capacity override CSV");
  cmd->add_option("--lead-location", m.lead_location, "Lead-time location parameter, minutes");
  cmd->add_option("--lead-scale", m.lead_scale, "Lead-time scale parameter, minutes");
  cmd->add_option("--lead-shape", m.lead_shape, "Lead-time skewness parameter");
  cmd->add_option("--beta-file", m.beta_file, "Lead-time mass CSV overriding the parametric model");
  cmd->add_option("--mean-lead", m.mean_lead, "Cost pivot in slots (0 = derive from lead model)");
  cmd->add_option("--mu", m.mu, "Mean compliance share");
  cmd->add_option("--sigma", m.sigma, "Compliance share standard deviation");
  cmd->add_option("--compliance-file", m.compliance_file, "Per-flight/slot compliance CSV");
  cmd->add_option("--gamma", m.gamma, "Per-slot overflow probability bound");
}

struct ModelBundle {
  Schedule schedule{TimeGrid{}, {}, {}};
  BetaModel beta;
  ComplianceModel compliance;
  int mean_lead = 4;
};

ModelBundle build_model(const ModelOptions& m) {
  if (m.schedule_file.empty()) throw InputError("a --schedule file is required");
  TimeGrid grid{static_cast<int>(m.slot_minutes), static_cast<int>(m.num_slots),
                static_cast<int>(m.grid_origin)};
  ScheduleLoadOptions load;
  load.grid = grid;
  load.default_capacity = m.capacity;
  load.window_len = static_cast<int>(m.window_len);
  load.capacity_file = m.capacity_file;
  ModelBundle b;
  b.schedule = load_schedule(m.schedule_file, load);

  SkewNormalParams lead{m.lead_location, m.lead_scale, m.lead_shape};
  if (m.beta_file.empty()) {
    DiscretizeOptions opt;
    opt.max_lead_slots = static_cast<int>(m.window_len);
    opt.slot_minutes = static_cast<int>(m.slot_minutes);
    b.beta = BetaModel(discretize_leadtime(lead, opt));
  } else {
    b.beta = BetaModel(load_beta_file(m.beta_file, static_cast<int>(m.window_len)));
  }
  b.mean_lead = m.mean_lead > 0 ? static_cast<int>(m.mean_lead)
                                : mean_leadtime_slots(lead, static_cast<int>(m.slot_minutes));

  b.compliance = m.compliance_file.empty()
                     ? ComplianceModel::constant(b.schedule, m.mu, m.sigma)
                     : load_compliance_file(m.compliance_file, b.schedule, m.mu, m.sigma);
  return b;
}

std::map<std::string, std::string> model_snapshot(const ModelOptions& m, const ModelBundle& b) {
  std::map<std::string, std::string> s;
  s["schedule"] = m.schedule_file;
  s["slot-minutes"] = std::to_string(m.slot_minutes);
  s["num-slots"] = std::to_string(m.num_slots);
  s["grid-origin"] = std::to_string(m.grid_origin);
  s["window-len"] = std::to_string(m.window_len);
  s["capacity"] = csv::fmt(m.capacity);
  if (!m.capacity_file.empty()) s["capacity-file"] = m.capacity_file;
  if (m.beta_file.empty()) {
    s["lead-location"] = csv::fmt(m.lead_location);
    s["lead-scale"] = csv::fmt(m.lead_scale);
    s["lead-shape"] = csv::fmt(m.lead_shape);
  } else {
    s["beta-file"] = m.beta_file;
  }
  s["mean-lead"] = std::to_string(b.mean_lead);
  if (m.compliance_file.empty()) {
    s["mu"] = csv::fmt(m.mu);
    s["sigma"] = csv::fmt(m.sigma);
  } else {
    s["compliance-file"] = m.compliance_file;
  }
  s["gamma"] = csv::fmt(m.gamma);
  return s;
}

std::vector<std::string> model_inputs(const ModelOptions& m) {
  std::vector<std::string> in;
  if (!m.schedule_file.empty()) in.push_back(m.schedule_file);
  if (!m.capacity_file.empty()) in.push_back(m.capacity_file);
  if (!m.beta_file.empty()) in.push_back(m.beta_file);
  if (!m.compliance_file.empty()) in.push_back(m.compliance_file);
  return in;
}

// ---------------------------------------------------------------------------
// Manifest.

struct RunContext {
  std::string out_dir = ".";
  std::uint64_t seed = 20240501;
  int jobs = 1;
  std::string config_file;
};

void write_manifest(const RunContext& ctx, const std::string& command,
                    std::map<std::string, std::string> config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = ctx.seed;
  config["seed"] = std::to_string(ctx.seed);
  config["jobs"] = std::to_string(ctx.jobs);
  if (!ctx.config_file.empty()) config["config"] = ctx.config_file;
  j["config"] = config;
  nlohmann::json jin = nlohmann::json::object();
  for (const std::string& p : inputs) jin[p] = file_digest(p);
  j["inputs"] = jin;
  nlohmann::json jout = nlohmann::json::object();
  for (const std::string& name : outputs) {
    jout[name] = file_digest((fs::path(ctx.out_dir) / name).string());
  }
  j["outputs"] = jout;
  std::ofstream out(fs::path(ctx.out_dir) / "manifest.json");
  if (!out) throw InputError("cannot write manifest in " + ctx.out_dir);
  out << j.dump(2) << '\n';
}

std::string out_path(const RunContext& ctx, const std::string& name) {
  return (fs::path(ctx.out_dir) / name).string();
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  ModelOptions model;
  std::string mode = "det";
};

int cmd_solve(const RunContext& ctx, const SolveArgs& args) {
  ModelBundle b = build_model(args.model);
  CostMatrix costs = build_costs(b.schedule, b.mean_lead);
  PolicyResult r;
  if (args.mode == "det") {
    r = solve_deterministic(b.schedule, costs);
  } else if (args.mode == "cc") {
    r = solve_chance_constrained(b.schedule, costs, b.beta, b.compliance,
                                 CCConfig{args.model.gamma});
  } else {
    throw InputError("--mode must be det or cc");
  }

  fs::create_directories(ctx.out_dir);
  std::vector<std::string> outputs;
  {
    std::ofstream stats(out_path(ctx, "solve_stats.csv"));
    stats << "mode,status,objective,iterations\n";
    stats << args.mode << ',' << to_string(r.status) << ',' << csv::fmt(r.objective) << ','
          << r.stats.iterations << '\n';
    outputs.push_back("solve_stats.csv");
  }
  if (r.status == SolveStatus::optimal) {
    save_policy(*r.policy, b.schedule, out_path(ctx, "policy.csv"));
    outputs.push_back("policy.csv");
    std::cout << "status: optimal\nobjective: " << csv::fmt(r.objective) << "\n";
  } else {
    std::cerr << "status: " << to_string(r.status) << "\n" << r.message << "\n";
    for (const OverloadInterval& o : r.overloads) {
      std::cerr << "  slots " << o.begin << ".." << o.end << ": committed demand "
                << csv::fmt(o.demand) << " exceeds capacity " << csv::fmt(o.capacity) << "\n";
    }
  }
  std::map<std::string, std::string> snap = model_snapshot(args.model, b);
  snap["mode"] = args.mode;
  write_manifest(ctx, "solve", snap, model_inputs(args.model), outputs);
  if (r.status == SolveStatus::optimal) return kExitOk;
  if (r.status == SolveStatus::infeasible) return kExitInfeasible;
  return kExitNumerical;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  ModelOptions model;
  std::string policy_file;
  long replications = 100;
  bool no_clamp = false;
  bool literal = false;
  bool export_arrivals = false;
};

int cmd_evaluate(const RunContext& ctx, const EvaluateArgs& args) {
  ModelBundle b = build_model(args.model);
  Policy policy = load_policy(args.policy_file, b.schedule);

  SimConfig sim;
  sim.seed = ctx.seed;
  sim.n_replications = static_cast<int>(args.replications);
  sim.clamp_alpha = !args.no_clamp;
  sim.algorithm1_literal = args.literal;
  sim.validate();

  std::vector<ArrivalStream> controlled =
      generate_arrivals(policy, b.schedule, b.beta, b.compliance, sim);
  std::vector<ArrivalStream> baseline = generate_baseline_arrivals(b.schedule, b.beta, sim);

  TtsSummary tts = tts_summary(baseline, controlled, b.schedule);
  int policy_missed = 0, baseline_missed = 0;
  for (int rep = 0; rep < sim.n_replications; ++rep) {
    if (missed_flight_check(fcfs_evaluate(controlled[static_cast<std::size_t>(rep)], b.schedule)).any) {
      ++policy_missed;
    }
    if (missed_flight_check(fcfs_evaluate(baseline[static_cast<std::size_t>(rep)], b.schedule)).any) {
      ++baseline_missed;
    }
  }

  fs::create_directories(ctx.out_dir);
  std::vector<std::string> outputs;
  save_trace(fcfs_evaluate(controlled[0], b.schedule), out_path(ctx, "policy_trace.csv"));
  outputs.push_back("policy_trace.csv");
  save_trace(fcfs_evaluate(baseline[0], b.schedule), out_path(ctx, "baseline_trace.csv"));
  outputs.push_back("baseline_trace.csv");
  {
    std::ofstream out(out_path(ctx, "tts.csv"));
    out << "replication,tts_hours\n";
    for (std::size_t rep = 0; rep < tts.per_replication.size(); ++rep) {
      out << rep << ',' << csv::fmt(tts.per_replication[rep]) << '\n';
    }
    outputs.push_back("tts.csv");
  }
  {
    std::ofstream out(out_path(ctx, "evaluate_summary.csv"));
    out << "tts_mean,tts_stderr,replications,policy_missed,baseline_missed\n";
    out << csv::fmt(tts.mean) << ',' << csv::fmt(tts.stderr_mean) << ',' << sim.n_replications
        << ',' << policy_missed << ',' << baseline_missed << '\n';
    outputs.push_back("evaluate_summary.csv");
  }
  if (args.export_arrivals) {
    auto dump = [&](const char* name, const std::vector<ArrivalStream>& streams) {
      std::ofstream out(out_path(ctx, name));
      out << "replication,slot,count\n";
      for (std::size_t rep = 0; rep < streams.size(); ++rep) {
        const auto& counts = streams[rep].counts;
        for (std::size_t t = 0; t < counts.size(); ++t) {
          if (counts[t] != 0.0) out << rep << ',' << t << ',' << csv::fmt(counts[t]) << '\n';
        }
      }
      outputs.push_back(name);
    };
    dump("policy_arrivals.csv", controlled);
    dump("baseline_arrivals.csv", baseline);
  }

  std::cout << "tts_mean: " << csv::fmt(tts.mean) << " +- " << csv::fmt(tts.stderr_mean)
            << " passenger-hours over " << sim.n_replications << " replications\n"
            << "policy replications with missed flights: " << policy_missed << "\n"
            << "baseline replications with missed flights: " << baseline_missed << "\n";

  std::map<std::string, std::string> snap = model_snapshot(args.model, b);
  snap["policy"] = args.policy_file;
  snap["replications"] = std::to_string(sim.n_replications);
  snap["clamp-alpha"] = sim.clamp_alpha ? "true" : "false";
  snap["algorithm1-literal"] = sim.algorithm1_literal ? "true" : "false";
  std::vector<std::string> inputs = model_inputs(args.model);
  inputs.push_back(args.policy_file);
  write_manifest(ctx, "evaluate", snap, inputs, outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  ModelOptions model;
  std::string param = "gamma";
  std::vector<double> values;
  long replications = 50;
  long violation_samples = 2000;
};

int cmd_sweep(const RunContext& ctx, const SweepArgs& args) {
  ModelBundle b = build_model(args.model);
  SweepSpec spec;
  spec.parameter = parse_sweep_parameter(args.param);
  spec.values = args.values.empty() ? default_sweep_values(spec.parameter) : args.values;
  spec.base.schedule = b.schedule;
  spec.base.beta = b.beta;
  spec.base.compliance = b.compliance;
  spec.base.cc = CCConfig{args.model.gamma};
  spec.base.mean_lead_slots = b.mean_lead;
  spec.violation_samples = static_cast<int>(args.violation_samples);

  SimConfig sim;
  sim.seed = ctx.seed;
  sim.n_replications = static_cast<int>(args.replications);

  std::vector<SweepRecord> rows = run_sweep(spec, sim, ctx.jobs);
  fs::create_directories(ctx.out_dir);
  save_sweep(rows, out_path(ctx, "sweep.csv"));
  for (const SweepRecord& r : rows) {
    std::cout << to_string(r.parameter) << '=' << csv::fmt(r.value) << " status "
              << to_string(r.status) << " objective " << csv::fmt(r.objective) << "\n";
  }

  std::map<std::string, std::string> snap = model_snapshot(args.model, b);
  snap["param"] = args.param;
  std::string vals;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    if (i) vals += ',';
    vals += csv::fmt(spec.values[i]);
  }
  snap["values"] = vals;
  snap["replications"] = std::to_string(sim.n_replications);
  snap["violation-samples"] = std::to_string(spec.violation_samples);
  write_manifest(ctx, "sweep", snap, model_inputs(args.model), {"sweep.csv"});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  long flights = 260;
  long seats = 49034;
  ModelOptions model;  // grid + window length + capacity reused
};

int cmd_synth(const RunContext& ctx, const SynthArgs& args) {
  SynthOptions opt;
  opt.n_flights = static_cast<int>(args.flights);
  opt.total_seats = args.seats;
  opt.grid = TimeGrid{static_cast<int>(args.model.slot_minutes),
                      static_cast<int>(args.model.num_slots),
                      static_cast<int>(args.model.grid_origin)};
  opt.default_capacity = args.model.capacity;
  opt.window_len = static_cast<int>(args.model.window_len);
  Schedule sched = synth_schedule(ctx.seed, opt);

  fs::create_directories(ctx.out_dir);
  save_schedule(sched, out_path(ctx, "schedule.csv"));
  std::cout << "wrote " << sched.num_flights() << " flights, " << sched.total_seats()
            << " seats\n";

  std::map<std::string, std::string> snap;
  snap["flights"] = std::to_string(args.flights);
  snap["seats"] = std::to_string(args.seats);
  snap["slot-minutes"] = std::to_string(args.model.slot_minutes);
  snap["num-slots"] = std::to_string(args.model.num_slots);
  snap["grid-origin"] = std::to_string(args.model.grid_origin);
  snap["window-len"] = std::to_string(args.model.window_len);
  snap["capacity"] = csv::fmt(args.model.capacity);
  write_manifest(ctx, "synth", snap, {}, {"schedule.csv"});
  return kExitOk;
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  try {
    RunContext ctx;
    ctx.config_file = find_config_arg(argc, argv);
    Defaults defaults(ctx.config_file.empty() ? std::map<std::string, std::string>{}
                                              : read_config_file(ctx.config_file));
    ctx.seed = static_cast<std::uint64_t>(defaults.integer("seed", 20240501));
    ctx.jobs = static_cast<int>(defaults.integer("jobs", 1));
    ctx.out_dir = defaults.text("out", ".");

    CLI::App app{"Arrival-slot recommendation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_echo;
    app.add_option("--config", config_echo, "Flat key=value config file");
    app.add_option("--seed", ctx.seed, "Root seed for all randomness");
    app.add_option("--jobs", ctx.jobs, "Worker cap for independent tasks");
    app.add_option("--out", ctx.out_dir, "Output directory");

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Compute a recommendation policy");
    add_model_options(solve, solve_args.model, defaults, true);
    solve_args.mode = defaults.text("mode", solve_args.mode);
    solve->add_option("--mode", solve_args.mode, "det (expected arrivals) or cc (overflow-protected)");

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Simulate a policy against the baseline");
    add_model_options(evaluate, eval_args.model, defaults, true);
    eval_args.policy_file = defaults.text("policy", eval_args.policy_file);
    eval_args.replications = defaults.integer("replications", eval_args.replications);
    auto* pol = evaluate->add_option("--policy", eval_args.policy_file, "Policy CSV to evaluate");
    if (eval_args.policy_file.empty()) pol->required();
    evaluate->add_option("--replications", eval_args.replications, "Monte-Carlo replications");
    evaluate->add_flag("--no-clamp-alpha", eval_args.no_clamp,
                       "Keep sampled compliance shares outside [0, 1]");
    evaluate->add_flag("--algorithm1-literal", eval_args.literal,
                       "Weight the fallback by the share itself (non-normalizing variant)");
    evaluate->add_flag("--export-arrivals", eval_args.export_arrivals,
                       "Write per-replication arrival counts");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Re-solve while varying one compliance parameter");
    add_model_options(sweep, sweep_args.model, defaults, true);
    sweep_args.param = defaults.text("param", sweep_args.param);
    sweep_args.replications = defaults.integer("replications", sweep_args.replications);
    sweep_args.violation_samples = defaults.integer("violation-samples", sweep_args.violation_samples);
    sweep->add_option("--param", sweep_args.param, "gamma, mu, or sigma");
    sweep->add_option("--values", sweep_args.values, "Grid values")->delimiter(',');
    sweep->add_option("--replications", sweep_args.replications, "Monte-Carlo replications per point");
    sweep->add_option("--violation-samples", sweep_args.violation_samples,
                      "Samples for overflow-rate estimation");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic flight schedule");
    synth_args.flights = defaults.integer("flights", synth_args.flights);
    synth_args.seats = defaults.integer("seats", synth_args.seats);
    synth->add_option("--flights", synth_args.flights, "Number of flights");
    synth->add_option("--seats", synth_args.seats, "Total seats across all flights");
    add_grid_options(synth, synth_args.model, defaults);
    synth->add_option("--capacity", synth_args.model.capacity, "Checkpoint throughput per slot");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (solve->parsed()) return cmd_solve(ctx, solve_args);
    if (evaluate->parsed()) return cmd_evaluate(ctx, eval_args);
    if (sweep->parsed()) return cmd_sweep(ctx, sweep_args);
    if (synth->parsed()) return cmd_synth(ctx, synth_args);
    std::cerr << "no command given\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
