#include "mapfsplit/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <tuple>

#include "mapfsplit/errors.hpp"
#include "mapfsplit/validation.hpp"

namespace mapfsplit {

void validate_config(const ExperimentConfig& c) {
  if (c.agents.empty()) throw DomainError("agent sweep is empty");
  for (std::size_t i = 0; i < c.agents.size(); ++i) {
    if (c.agents[i] == 0) throw DomainError("agent counts must be positive");
    if (i > 0 && c.agents[i] <= c.agents[i - 1]) throw DomainError("agent counts must be ascending");
  }
  if (c.trials < 1) throw DomainError("trials must be >= 1");
  if (c.variants.empty()) throw DomainError("no solver variants");
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t n, int trial) {
  return base * 1000003ULL + static_cast<std::uint64_t>(n) * 1009ULL + static_cast<std::uint64_t>(trial);
}

std::string solver_name(double w) { return w <= 1.0 ? "cbs" : "ecbs"; }

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Source {
  std::shared_ptr<const GridGraph> graph;
  ScenarioFile scen;
  std::string name;
};

Instance make_instance(const ExperimentConfig& c, const Source& src, std::size_t n, int trial,
                       std::uint64_t seed) {
  if (!src.graph) {
    return generate_random(c.source.width, c.source.height, c.source.obstacles, n, seed);
  }
  if (c.source.scen_path.empty()) return generate_random_on_map(src.graph, n, seed);
  const std::size_t first = static_cast<std::size_t>(trial) * n;
  if (first + n > src.scen.entries.size()) {
    throw GenerationError("scenario has " + std::to_string(src.scen.entries.size()) + " entries, trial needs " +
                          std::to_string(first + n));
  }
  std::vector<Robot> robots;
  for (std::size_t i = first; i < first + n; ++i) {
    const ScenarioEntry& e = src.scen.entries[i];
    robots.push_back({{e.start_x + 1, e.start_y + 1}, {e.goal_x + 1, e.goal_y + 1}});
  }
  return Instance(src.graph, std::move(robots));
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const RunRecord&)>& on_record) {
  validate_config(config);
  Source src;
  if (!config.source.map_path.empty()) {
    src.graph = std::make_shared<const GridGraph>(parse_map(read_text_file(config.source.map_path)));
    src.name = std::filesystem::path(config.source.map_path).stem().string();
    if (!config.source.scen_path.empty()) src.scen = parse_scenario_file(read_text_file(config.source.scen_path));
  } else {
    src.name = "random-" + std::to_string(config.source.width) + "x" + std::to_string(config.source.height) + "-" +
               fmt("%.2f", config.source.obstacles);
  }

  std::vector<RunRecord> out;
  for (std::size_t n : config.agents) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = instance_seed(config.seed, n, trial);
      const std::string id = src.name + "-n" + std::to_string(n) + "-t" + std::to_string(trial);
      std::optional<Instance> inst;
      std::string gen_error;
      try {
        inst = make_instance(config, src, n, trial, seed);
      } catch (const Error& e) {
        gen_error = e.what();
      }
      for (const PipelineOptions& variant : config.variants) {
        RunRecord r;
        r.instance = id;
        r.seed = seed;
        r.n = n;
        r.solver = solver_name(variant.solver.w);
        r.w = variant.solver.w;
        r.split = strategy_label(variant);
        r.workers = std::max<std::size_t>(1, variant.workers);
        if (!inst) {
          r.status = "error";
          r.message = gen_error;
        } else {
          const LowerBounds lb = lower_bounds(*inst);
          r.lb_mk = lb.makespan;
          r.lb_soc = lb.sum_of_costs;
          PipelineOptions o = variant;
          o.time.seed = seed;
          try {
            const PipelineResult res = run_pipeline(*inst, o);
            r.phases = res.stats.phases;
            r.subproblems = res.stats.subproblems;
            r.workers = res.stats.workers;
            r.wall_ms = res.stats.wall_ms;
            r.split_ms = res.stats.split_ms;
            r.subsolve_ms = res.stats.subsolve_ms;
            r.status = to_string(res.status);
            r.message = res.message;
            if (res.solved() && validate(*inst, res.plan).ok()) {
              const Metrics m = compute_metrics(*inst, res.plan);
              r.solved = true;
              r.makespan = m.makespan;
              r.soc = m.sum_of_costs;
              r.ratio_mk = m.ratio_makespan;
              r.ratio_soc = m.ratio_soc;
            }
          } catch (const Error& e) {
            r.status = "error";
            r.message = e.what();
          }
        }
        if (on_record) on_record(r);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

std::string csv_header() {
  return "instance,seed,n,solver,w,split,phases,subproblems,workers,solved,wall_ms,makespan,soc,lb_mk,lb_soc,"
         "ratio_mk,ratio_soc";
}

std::string csv_row(const RunRecord& r) {
  auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
  auto opt_ratio = [](const std::optional<double>& v) { return v ? fmt("%.6f", *v) : std::string(); };
  return r.instance + "," + std::to_string(r.seed) + "," + std::to_string(r.n) + "," + r.solver + "," +
         fmt("%g", r.w) + "," + r.split + "," + std::to_string(r.phases) + "," + std::to_string(r.subproblems) +
         "," + std::to_string(r.workers) + "," + (r.solved ? "1" : "0") + "," + fmt("%.3f", r.wall_ms) + "," +
         opt_int(r.makespan) + "," + opt_int(r.soc) + "," + std::to_string(r.lb_mk) + "," +
         std::to_string(r.lb_soc) + "," + opt_ratio(r.ratio_mk) + "," + opt_ratio(r.ratio_soc);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::size_t, std::string, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    const Key key{r.n, r.solver, r.w, r.split};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const auto& runs = groups[key];
    SummaryRow s;
    std::tie(s.n, s.solver, s.w, s.split) = key;
    s.runs = runs.size();
    std::vector<double> walls;
    double mk = 0.0;
    double soc = 0.0;
    for (const RunRecord* r : runs) {
      walls.push_back(r->wall_ms);
      s.mean_wall_ms += r->wall_ms;
      s.mean_split_ms += r->split_ms;
      s.mean_subsolve_ms += r->subsolve_ms;
      if (r->solved) {
        ++s.solved;
        mk += *r->ratio_mk;
        soc += *r->ratio_soc;
      }
    }
    const double count = static_cast<double>(s.runs);
    s.mean_wall_ms /= count;
    s.mean_split_ms /= count;
    s.mean_subsolve_ms /= count;
    std::sort(walls.begin(), walls.end());
    const std::size_t mid = walls.size() / 2;
    s.median_wall_ms = walls.size() % 2 ? walls[mid] : 0.5 * (walls[mid - 1] + walls[mid]);
    if (s.solved > 0) {
      s.mean_ratio_mk = mk / static_cast<double>(s.solved);
      s.mean_ratio_soc = soc / static_cast<double>(s.solved);
    }
    out.push_back(s);
  }
  return out;
}

std::string summary_header() {
  return "n,solver,w,split,runs,solved,mean_wall_ms,median_wall_ms,mean_split_ms,mean_subsolve_ms,mean_ratio_mk,"
         "mean_ratio_soc";
}

std::string summary_row(const SummaryRow& s) {
  auto opt_ratio = [](const std::optional<double>& v) { return v ? fmt("%.6f", *v) : std::string(); };
  return std::to_string(s.n) + "," + s.solver + "," + fmt("%g", s.w) + "," + s.split + "," +
         std::to_string(s.runs) + "," + std::to_string(s.solved) + "," + fmt("%.3f", s.mean_wall_ms) + "," +
         fmt("%.3f", s.median_wall_ms) + "," + fmt("%.3f", s.mean_split_ms) + "," +
         fmt("%.3f", s.mean_subsolve_ms) + "," + opt_ratio(s.mean_ratio_mk) + "," + opt_ratio(s.mean_ratio_soc);
}

}  // namespace mapfsplit
