// mapfsplit: solve, bench, gen and validate verbs.
//
// Exit codes: 0 solved / valid, 2 timeout, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mapfsplit/bench.hpp"
#include "mapfsplit/errors.hpp"
#include "mapfsplit/pipeline.hpp"
#include "mapfsplit/validation.hpp"

using namespace mapfsplit;
using nlohmann::json;

namespace {

struct InstanceArgs {
  std::string instance;
  std::string map;
  std::string scen;
  std::size_t agents = 0;
};

struct SolverArgs {
  std::string solver = "ecbs";
  double w = 0.0;  // 0: 1 for cbs, 1.5 for ecbs
  std::string objective = "makespan";
  double timeout_s = 60.0;
  std::size_t node_limit = 100'000;
};

struct SplitArgs {
  int time_split = 0;
  std::vector<double> ratios;
  std::string time_variant;
  std::string check = "off";
  std::uint64_t seed = 0;
  std::string space_split;
  std::string buffer = "4x2";
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  int phases = 0;
  std::size_t workers = 1;
  bool no_fallback = false;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("--instance", a.instance, "Instance JSON file");
  cmd->add_option("--map", a.map, "MovingAI .map file");
  cmd->add_option("--scen", a.scen, "MovingAI .scen file");
  cmd->add_option("--agents", a.agents, "Use the first N scenario entries");
}

void add_solver_options(CLI::App* cmd, SolverArgs& a) {
  cmd->add_option("--solver", a.solver, "cbs or ecbs")->check(CLI::IsMember({"cbs", "ecbs"}));
  cmd->add_option("--w", a.w, "Suboptimality factor (default 1 for cbs, 1.5 for ecbs)");
  cmd->add_option("--objective", a.objective, "makespan or soc")->check(CLI::IsMember({"makespan", "soc"}));
  cmd->add_option("--timeout", a.timeout_s, "Seconds per run, splitting included");
  cmd->add_option("--node-limit", a.node_limit, "Conflict-tree nodes per solve");
}

void add_split_options(CLI::App* cmd, SplitArgs& a, bool seed = true) {
  cmd->add_option("--time-split", a.time_split, "Number of time segments k");
  cmd->add_option("--ratios", a.ratios, "k segment weights summing to 1")->delimiter(',');
  cmd->add_option("--time-variant", a.time_variant, "Boundary rule: makespan or soc (default: objective)")
      ->check(CLI::IsMember({"makespan", "soc"}));
  cmd->add_option("--check-solvable", a.check, "off, oracle or subsolver")
      ->check(CLI::IsMember({"off", "oracle", "subsolver"}));
  if (seed) cmd->add_option("--seed", a.seed, "Seed for intermediate-state draws");
  cmd->add_option("--space-split", a.space_split, "Region grid LxM");
  cmd->add_option("--buffer", a.buffer, "Buffer block size WxH (across x along the cut)");
  cmd->add_option("--lambda1", a.lambda1, "Allocation weight of the threshold term");
  cmd->add_option("--lambda2", a.lambda2, "Allocation weight of the density term");
  cmd->add_option("--phases", a.phases, "Space-split phase count (default: smallest feasible)");
  cmd->add_option("--workers", a.workers, "Threads for independent sub-problems");
  cmd->add_flag("--no-fallback", a.no_fallback, "Fail instead of redrawing or solving unsplit");
}

std::pair<int, int> parse_pair(const std::string& text, const char* what) {
  int a = 0;
  int b = 0;
  int used = 0;
  if (std::sscanf(text.c_str(), "%dx%d%n", &a, &b, &used) != 2 || used != static_cast<int>(text.size()) || a < 1 ||
      b < 1) {
    throw DomainError(std::string("bad ") + what + " '" + text + "', expected AxB");
  }
  return {a, b};
}

Objective parse_objective(const std::string& s) {
  return s == "soc" ? Objective::kSumOfCosts : Objective::kMakespan;
}

PipelineOptions pipeline_options(const SolverArgs& s, const SplitArgs& sp) {
  PipelineOptions o;
  o.solver.objective = parse_objective(s.objective);
  o.solver.w = s.w > 0.0 ? s.w : (s.solver == "cbs" ? 1.0 : 1.5);
  if (s.solver == "cbs" && o.solver.w != 1.0) throw DomainError("cbs runs with w = 1; use --solver ecbs");
  o.solver.budget.time_limit =
      std::chrono::milliseconds(static_cast<long long>(std::max(0.0, s.timeout_s) * 1000.0));
  o.solver.budget.node_limit = s.node_limit;
  o.time.ratios = sp.ratios;
  o.time.variant = sp.time_variant.empty() ? o.solver.objective : parse_objective(sp.time_variant);
  o.time.check = sp.check == "oracle" ? CheckMode::kOracle
                 : sp.check == "subsolver" ? CheckMode::kSubsolver
                                           : CheckMode::kOff;
  o.time.seed = sp.seed;
  const auto [across, along] = parse_pair(sp.buffer, "buffer");
  o.space.buffer = {across, along};
  o.space.lambda1 = sp.lambda1;
  o.space.lambda2 = sp.lambda2;
  o.space.phases = sp.phases;
  o.workers = sp.workers;
  o.fallback = !sp.no_fallback;
  const bool time = sp.time_split > 0;
  const bool space = !sp.space_split.empty();
  if (time) o.time.k = sp.time_split;
  if (time && !sp.ratios.empty() && static_cast<int>(sp.ratios.size()) != sp.time_split) {
    throw DomainError("--ratios needs exactly k values");
  }
  if (!time && !sp.ratios.empty()) o.time.k = static_cast<int>(sp.ratios.size());
  if (space) {
    const auto [l, m] = parse_pair(sp.space_split, "space split");
    o.space.l = l;
    o.space.m = m;
  }
  const bool any_time = time || !sp.ratios.empty();
  o.split = space ? (any_time ? SplitKind::kTimeSpace : SplitKind::kSpace)
                  : (any_time ? SplitKind::kTime : SplitKind::kNone);
  return o;
}

Instance load_instance(const InstanceArgs& a) {
  if (!a.instance.empty()) {
    if (!a.map.empty() || !a.scen.empty()) throw DomainError("use either --instance or --map/--scen");
    json j;
    try {
      j = json::parse(read_text_file(a.instance));
    } catch (const json::parse_error& e) {
      throw ParseError(0, std::string("instance JSON: ") + e.what());
    }
    return instance_from_json(j);
  }
  if (a.map.empty() || a.scen.empty()) throw DomainError("an instance needs --instance or --map with --scen");
  auto graph = std::make_shared<const GridGraph>(parse_map(read_text_file(a.map)));
  std::optional<std::size_t> agents;
  if (a.agents > 0) agents = a.agents;
  return parse_scenario(read_text_file(a.scen), graph, agents);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_solve(const InstanceArgs& ia, const SolverArgs& sa, const SplitArgs& sp, const std::string& out) {
  const Instance inst = load_instance(ia);
  const PipelineOptions o = pipeline_options(sa, sp);
  const PipelineResult r = run_pipeline(inst, o);
  const LowerBounds lb = lower_bounds(inst);
  json report = {{"status", to_string(r.status)},
                 {"n", inst.size()},
                 {"solver", solver_name(o.solver.w)},
                 {"w", o.solver.w},
                 {"objective", to_string(o.solver.objective)},
                 {"split", strategy_label(o)},
                 {"strategy", r.stats.strategy},
                 {"phases", r.stats.phases},
                 {"subproblems", r.stats.subproblems},
                 {"workers", r.stats.workers},
                 {"wall_ms", r.stats.wall_ms},
                 {"split_ms", r.stats.split_ms},
                 {"subsolve_ms", r.stats.subsolve_ms},
                 {"lb_mk", lb.makespan},
                 {"lb_soc", lb.sum_of_costs},
                 {"fallbacks", r.stats.fallbacks}};
  if (r.solved()) {
    const Metrics m = compute_metrics(inst, r.plan);
    report["makespan"] = m.makespan;
    report["soc"] = m.sum_of_costs;
    report["ratio_mk"] = m.ratio_makespan;
    report["ratio_soc"] = m.ratio_soc;
    if (!out.empty()) write_file(out, plan_to_json(r.plan).dump() + "\n");
  } else {
    report["message"] = r.message;
  }
  std::cout << report.dump(2) << "\n";
  if (r.solved()) return 0;
  return r.status == SolveStatus::kTimeout ? 2 : 1;
}

struct BenchArgs {
  std::string map;
  std::string scen;
  std::string size = "32x32";
  double obstacles = 0.10;
  std::vector<std::size_t> agents;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string splits = "none";
  std::string ws;
  std::string out = "bench.csv";
  std::string summary;
};

int cmd_bench(const BenchArgs& b, const SolverArgs& sa, const SplitArgs& sp) {
  ExperimentConfig c;
  c.source.map_path = b.map;
  c.source.scen_path = b.scen;
  if (!b.scen.empty() && b.map.empty()) throw DomainError("--scen needs --map");
  const auto [w, h] = parse_pair(b.size, "size");
  c.source.width = w;
  c.source.height = h;
  c.source.obstacles = b.obstacles;
  c.agents = b.agents;
  c.trials = b.trials;
  c.seed = b.seed;
  std::vector<double> weights;
  for (const std::string& s : split_list(b.ws)) weights.push_back(std::stod(s));
  if (weights.empty()) weights.push_back(0.0);
  for (double weight : weights) {
    for (const std::string& label : split_list(b.splits)) {
      SolverArgs s = sa;
      s.w = weight > 0.0 ? weight : sa.w;
      if (weight > 1.0) s.solver = "ecbs";
      PipelineOptions o = pipeline_options(s, sp);
      apply_strategy_label(label, o);
      c.variants.push_back(o);
    }
  }
  validate_config(c);

  std::ofstream csv(b.out, std::ios::binary);
  if (!csv) throw Error("cannot write " + b.out);
  csv << csv_header() << "\n";
  const auto records = run_experiment(c, [&](const RunRecord& r) {
    csv << csv_row(r) << "\n" << std::flush;
    std::cerr << r.instance << " " << r.split << " w=" << r.w << " " << r.status << " " << r.wall_ms << " ms\n";
  });
  std::string summary = b.summary;
  if (summary.empty()) {
    const std::string stem = b.out.size() > 4 && b.out.substr(b.out.size() - 4) == ".csv"
                                 ? b.out.substr(0, b.out.size() - 4)
                                 : b.out;
    summary = stem + ".summary.csv";
  }
  std::ostringstream s;
  s << summary_header() << "\n";
  for (const SummaryRow& row : summarize(records)) s << summary_row(row) << "\n";
  write_file(summary, s.str());
  return 0;
}

int cmd_gen(const std::string& size, double obstacles, std::size_t agents, std::uint64_t seed,
            const std::string& out, const std::string& movingai) {
  const auto [w, h] = parse_pair(size, "size");
  const Instance inst = generate_random(w, h, obstacles, agents, seed);
  const std::string text = instance_to_json(inst).dump() + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  if (!movingai.empty()) {
    const std::string map_name = std::filesystem::path(movingai).filename().string() + ".map";
    write_file(movingai + ".map", write_map(inst.graph()));
    write_file(movingai + ".scen", write_scenario(inst, map_name));
  }
  return 0;
}

int cmd_validate(const InstanceArgs& ia, const std::string& plan_path) {
  const Instance inst = load_instance(ia);
  json j;
  try {
    j = json::parse(read_text_file(plan_path));
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("plan JSON: ") + e.what());
  }
  const Plan plan = plan_from_json(j);
  const ValidationReport report = validate(inst, plan);
  std::cout << to_json(report).dump(2) << "\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot path planning with time and space splitting"};
  app.require_subcommand(1);

  InstanceArgs solve_inst;
  SolverArgs solve_solver;
  SplitArgs solve_split;
  std::string solve_out;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  add_instance_options(solve, solve_inst);
  add_solver_options(solve, solve_solver);
  add_split_options(solve, solve_split);
  solve->add_option("--out", solve_out, "Write the plan JSON here");

  BenchArgs bench_args;
  SolverArgs bench_solver;
  SplitArgs bench_split;
  auto* bench = app.add_subcommand("bench", "Run a seeded sweep and write CSV");
  bench->add_option("--map", bench_args.map, "MovingAI .map (random grid when absent)");
  bench->add_option("--scen", bench_args.scen, "MovingAI .scen; trial t takes entries [t*n, t*n+n)");
  bench->add_option("--size", bench_args.size, "Random grid WxH");
  bench->add_option("--obstacles", bench_args.obstacles, "Random obstacle ratio");
  bench->add_option("--agents", bench_args.agents, "Agent counts, ascending")->delimiter(',')->required();
  bench->add_option("--trials", bench_args.trials, "Instances per agent count");
  bench->add_option("--seed", bench_args.seed, "Base seed of the instance stream");
  bench->add_option("--splits", bench_args.splits, "Strategies: none,<k>t,<l>x<m>s,<l>x<m>s<k>t");
  bench->add_option("--ws", bench_args.ws, "Comma-separated w values, one variant each");
  bench->add_option("--out", bench_args.out, "Per-run CSV");
  bench->add_option("--summary", bench_args.summary, "Summary CSV (default: <out>.summary.csv)");
  add_solver_options(bench, bench_solver);
  add_split_options(bench, bench_split, false);

  std::string gen_size = "32x32";
  double gen_obstacles = 0.10;
  std::size_t gen_agents = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_movingai;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--size", gen_size, "Grid WxH");
  gen->add_option("--obstacles", gen_obstacles, "Obstacle ratio in [0, 1)");
  gen->add_option("--agents", gen_agents, "Robot count");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Instance JSON (stdout when absent)");
  gen->add_option("--movingai", gen_movingai, "Also write PREFIX.map and PREFIX.scen");

  InstanceArgs val_inst;
  std::string val_plan;
  auto* val = app.add_subcommand("validate", "Check a plan against an instance");
  add_instance_options(val, val_inst);
  val->add_option("--plan", val_plan, "Plan JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_inst, solve_solver, solve_split, solve_out);
    if (*bench) return cmd_bench(bench_args, bench_solver, bench_split);
    if (*gen) return cmd_gen(gen_size, gen_obstacles, gen_agents, gen_seed, gen_out, gen_movingai);
    if (*val) return cmd_validate(val_inst, val_plan);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
