// One PASS/FAIL line per acceptance criterion. Pass criterion numbers as
// arguments to run a subset. Exit status is 0 only when every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mapfsplit/bench.hpp"
#include "mapfsplit/errors.hpp"
#include "mapfsplit/pipeline.hpp"
#include "mapfsplit/validation.hpp"
#include "oracles/allocation_oracle.hpp"
#include "oracles/joint_oracle.hpp"

using namespace mapfsplit;
using std::chrono::milliseconds;
using std::chrono::seconds;

namespace {

// Pinned thresholds.
constexpr int kOracleRandom = 200;
constexpr int kSuboptInstances = 100;
constexpr double kSuboptW = 1.5;
constexpr int kRandomInstances = 200;
constexpr int kAdditivityInstances = 25;
constexpr int kSpeedupInstances = 25;
constexpr double kSpeedupTimeFactor = 0.8;
constexpr double kSpeedupRatioMax = 1.15;
constexpr int kSocInstances = 25;
constexpr double kSocRatioMax = 1.25;
constexpr int kSpaceInstances = 25;
constexpr double kSpaceSolvedMin = 0.80;
constexpr std::size_t kAllocationSamples = 1000;
constexpr int kCombinedInstances = 10;
constexpr int kCombinedSplitSolvedMin = 8;
constexpr int kCombinedBaselineSolvedMax = 5;
constexpr double kCombinedRatioMax = 1.3;
constexpr auto kCombinedBudget = seconds(120);
constexpr auto kDefaultBudget = seconds(60);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Random instance for trial i, skipping seeds that cannot be generated.
Instance random_instance(int w, int h, double obstacles, std::size_t n, std::uint64_t seed) {
  for (std::uint64_t s = seed;; s += 7919) {
    try {
      return generate_random(w, h, obstacles, n, s);
    } catch (const GenerationError&) {
    }
  }
}

SolverOptions solver(double w, Objective obj, milliseconds budget = kDefaultBudget) {
  SolverOptions o;
  o.w = w;
  o.objective = obj;
  o.budget.time_limit = budget;
  return o;
}

// 1 --------------------------------------------------------------------------

void criterion1(Outcome& out) {
  std::vector<Instance> cases;
  auto all_placements = [&](int w, int h, std::size_t n) {
    const auto g = std::make_shared<const GridGraph>(GridGraph::empty(w, h));
    const auto cells = g->vertices();
    std::vector<std::vector<Vertex>> tuples;
    std::function<void(std::vector<Vertex>&)> rec = [&](std::vector<Vertex>& cur) {
      if (cur.size() == n) {
        tuples.push_back(cur);
        return;
      }
      for (Vertex v : cells) {
        if (std::find(cur.begin(), cur.end(), v) != cur.end()) continue;
        cur.push_back(v);
        rec(cur);
        cur.pop_back();
      }
    };
    std::vector<Vertex> cur;
    rec(cur);
    for (const auto& s : tuples) {
      for (const auto& t : tuples) {
        std::vector<Robot> robots;
        for (std::size_t i = 0; i < n; ++i) robots.push_back({s[i], t[i]});
        cases.emplace_back(g, std::move(robots));
      }
    }
  };
  all_placements(3, 2, 2);
  all_placements(2, 2, 3);
  const std::size_t exhaustive = cases.size();
  for (int i = 0; i < kOracleRandom; ++i) {
    const int w = 2 + i % 4;
    const int h = 2 + (i / 4) % 4;
    const std::size_t n = 1 + static_cast<std::size_t>(i % 3);
    cases.push_back(random_instance(w, h, 0.15, std::min<std::size_t>(n, static_cast<std::size_t>(w * h / 2)),
                                    static_cast<std::uint64_t>(i + 1)));
  }
  int infeasible = 0;
  int mismatches = 0;
  for (const Instance& inst : cases) {
    const auto mk = oracle::joint_makespan(inst);
    if (!mk) {
      ++infeasible;
      continue;
    }
    const auto soc = oracle::joint_soc(inst);
    const SolveResult a = solve(inst, solver(1.0, Objective::kMakespan));
    const SolveResult b = solve(inst, solver(1.0, Objective::kSumOfCosts));
    const bool ok = a.solved() && b.solved() && soc && a.objective == *mk && b.objective == *soc &&
                    validate(inst, a.plan).ok() && validate(inst, b.plan).ok() &&
                    compute_metrics(inst, a.plan).makespan == *mk &&
                    compute_metrics(inst, b.plan).sum_of_costs == *soc;
    if (!ok) ++mismatches;
  }
  out.pass = mismatches == 0;
  out.detail << cases.size() << " instances (" << exhaustive << " exhaustive, " << kOracleRandom
             << " random), " << infeasible << " infeasible per oracle skipped, " << mismatches << " mismatches";
}

// 2 --------------------------------------------------------------------------

void criterion2(Outcome& out) {
  int violations = 0;
  int unsolved = 0;
  double worst = 0.0;
  for (int i = 0; i < kSuboptInstances; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 12);
    const Instance inst = random_instance(16, 16, 0.10, n, 2000 + static_cast<std::uint64_t>(i));
    for (Objective obj : {Objective::kMakespan, Objective::kSumOfCosts}) {
      const SolveResult r = solve(inst, solver(kSuboptW, obj));
      if (!r.solved()) {
        ++unsolved;
        continue;
      }
      // objective <= 1.5 * lb, in integers.
      if (2 * r.objective > 3 * r.lower_bound || r.lower_bound > r.objective || !validate(inst, r.plan).ok()) {
        ++violations;
      }
      if (r.lower_bound > 0) worst = std::max(worst, static_cast<double>(r.objective) / r.lower_bound);
    }
  }
  out.pass = violations == 0 && unsolved == 0;
  out.detail << kSuboptInstances << " instances x 2 objectives, " << unsolved << " unsolved, " << violations
             << " bound violations, worst objective/lb " << worst;
}

// 3 --------------------------------------------------------------------------

void criterion3(Outcome& out) {
  int failures = 0;
  int checked = 0;
  int redraws = 0;
  std::uint64_t seed = 3000;
  for (int i = 0; i < kRandomInstances; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 4);
    Instance inst = random_instance(6, 6, 0.10, n, seed++);
    while (!oracle::fast_solvable(inst)) inst = random_instance(6, 6, 0.10, n, seed++);
    for (int k : {2, 3, 4}) {
      TimeSplitSpec spec;
      spec.k = k;
      spec.check = CheckMode::kOracle;
      spec.seed = static_cast<std::uint64_t>(i);
      try {
        const IntermediateConfigs cfg = compute_intermediate_configs(inst, spec);
        redraws += cfg.redraws;
        for (const Instance& part : split_instance(inst, cfg)) {
          ++checked;
          if (!oracle::fast_solvable(part)) ++failures;
        }
      } catch (const SplitError&) {
        ++failures;
      }
    }
  }
  out.pass = failures == 0;
  out.detail << kRandomInstances << " solvable instances, k in {2,3,4}, " << checked << " sub-problems checked, "
             << failures << " failures, " << redraws << " redraws";
}

// 4 --------------------------------------------------------------------------

void criterion4(Outcome& out) {
  int violations = 0;
  int additivity = 0;
  int unsolved = 0;
  for (int i = 0; i < kAdditivityInstances; ++i) {
    const Instance inst = random_instance(32, 32, 0.10, 40, 4000 + static_cast<std::uint64_t>(i));
    for (int k : {2, 4}) {
      TimeSplitSpec spec;
      spec.k = k;
      spec.seed = static_cast<std::uint64_t>(i);
      const auto parts = split_instance(inst, compute_intermediate_configs(inst, spec));
      std::vector<Plan> plans;
      int sum = 0;
      for (const Instance& part : parts) {
        const SolveResult r = solve(part, solver(1.5, Objective::kMakespan));
        if (!r.solved()) break;
        sum += r.plan.horizon();
        plans.push_back(r.plan);
      }
      if (plans.size() != parts.size()) {
        ++unsolved;
        continue;
      }
      const Plan whole = concatenate(plans);
      if (!validate(inst, whole).ok()) {
        ++violations;
        continue;
      }
      if (whole.horizon() != sum || compute_metrics(inst, whole).makespan != sum) ++additivity;
    }
  }
  out.pass = violations == 0 && additivity == 0 && unsolved == 0;
  out.detail << kAdditivityInstances << " instances x k in {2,4}, " << unsolved << " unsolved parts, " << violations
             << " invalid plans, " << additivity << " additivity breaks";
}

// 5 --------------------------------------------------------------------------

void criterion5(Outcome& out) {
  std::vector<double> base_ms;
  std::vector<double> split_ms;
  double ratio = 0.0;
  int solved = 0;
  int base_solved = 0;
  for (int i = 0; i < kSpeedupInstances; ++i) {
    const Instance inst = random_instance(32, 32, 0.10, 60, 5000 + static_cast<std::uint64_t>(i));
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kMakespan);
    o.fallback = false;
    const PipelineResult base = run_pipeline(inst, o);
    base_ms.push_back(base.stats.wall_ms);
    base_solved += base.solved();
    o.split = SplitKind::kTime;
    o.time.k = 4;
    o.time.seed = static_cast<std::uint64_t>(i);
    o.workers = 4;
    const PipelineResult split = run_pipeline(inst, o);
    split_ms.push_back(split.stats.wall_ms);
    if (split.solved()) {
      ++solved;
      ratio += compute_metrics(inst, split.plan).ratio_makespan;
    }
  }
  const double mb = median(base_ms);
  const double ms = median(split_ms);
  const double mean_ratio = solved ? ratio / solved : 0.0;
  out.pass = solved > 0 && ms <= kSpeedupTimeFactor * mb && mean_ratio <= kSpeedupRatioMax;
  out.detail << "median wall none " << mb << " ms, 4t " << ms << " ms (x" << (mb > 0 ? ms / mb : 0.0)
             << "), mean makespan ratio 4t " << mean_ratio << ", solved none " << base_solved << "/"
             << kSpeedupInstances << " 4t " << solved << "/" << kSpeedupInstances;
}

// 6 --------------------------------------------------------------------------

void criterion6(Outcome& out) {
  double soc_variant = 0.0;
  double naive = 0.0;
  int solved_a = 0;
  int solved_b = 0;
  for (int i = 0; i < kSocInstances; ++i) {
    const Instance inst = random_instance(32, 32, 0.10, 40, 6000 + static_cast<std::uint64_t>(i));
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kSumOfCosts);
    o.split = SplitKind::kTime;
    o.fallback = false;
    o.time.k = 2;
    o.time.seed = static_cast<std::uint64_t>(i);
    o.time.variant = Objective::kSumOfCosts;
    const PipelineResult a = run_pipeline(inst, o);
    if (a.solved()) {
      ++solved_a;
      soc_variant += compute_metrics(inst, a.plan).ratio_soc;
    }
    o.time.variant = Objective::kMakespan;
    const PipelineResult b = run_pipeline(inst, o);
    if (b.solved()) {
      ++solved_b;
      naive += compute_metrics(inst, b.plan).ratio_soc;
    }
  }
  const double ma = solved_a ? soc_variant / solved_a : 0.0;
  const double mb = solved_b ? naive / solved_b : 0.0;
  out.pass = solved_a == kSocInstances && solved_b == kSocInstances && ma < mb && ma <= kSocRatioMax;
  out.detail << "mean SOC ratio: threshold variant " << ma << " (" << solved_a << " solved), midpoint " << mb << " ("
             << solved_b << " solved)";
}

// 7 --------------------------------------------------------------------------

void criterion7(Outcome& out) {
  int solved = 0;
  int invalid = 0;
  int overlap = 0;
  std::size_t calls = 0;
  std::size_t mismatches = 0;
  for (int i = 0; i < kSpaceInstances; ++i) {
    const Instance inst = random_instance(64, 64, 0.05, 80, 7000 + static_cast<std::uint64_t>(i));
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kMakespan);
    o.split = SplitKind::kSpace;
    o.space.l = 2;
    o.space.m = 1;
    o.space.buffer = {4, 2};
    o.fallback = false;
    // Every call is checked; the criterion needs at least kAllocationSamples.
    o.observer = [&](const AllocationCall& c) {
      ++calls;
      const auto expected = oracle::best_allocation(inst.graph(), c.subset->vertices(), c.from, c.goal,
                                                    c.params.lambda1, c.params.lambda2, c.params.t1, c.params.t2,
                                                    *c.used);
      if (expected.has_value() != c.result.has_value() || (expected && expected->cell != *c.result)) {
        ++mismatches;
      }
    };
    const PipelineResult r = run_pipeline(inst, o);
    if (r.solved()) {
      ++solved;
      if (!validate(inst, r.plan).ok()) ++invalid;
    }
    // Phase sub-instances must not share a vertex.
    try {
      const SpacePartition part = build_partition(inst.graph_ptr(), 2, 1, {4, 2});
      const PhasePlan plan = plan_phases(inst, part);
      for (const Phase& ph : plan.schedule) {
        std::vector<int> seen(static_cast<std::size_t>(inst.graph().cell_count()), 0);
        for (const RegionTask& t : ph.tasks) {
          for (VertexId v = 0; v < t.instance.graph().cell_count(); ++v) {
            if (t.instance.graph().is_vertex(v) && seen[static_cast<std::size_t>(v)]++ > 0) ++overlap;
          }
        }
      }
    } catch (const Error&) {
      // Unroutable instances count as unsolved above.
    }
  }
  const double rate = static_cast<double>(solved) / kSpaceInstances;
  out.pass = rate >= kSpaceSolvedMin && invalid == 0 && overlap == 0 && mismatches == 0 &&
             calls >= kAllocationSamples;
  out.detail << "solved " << solved << "/" << kSpaceInstances << ", " << invalid << " invalid, " << overlap
             << " shared vertices, allocation oracle " << mismatches << " mismatches over " << calls
             << " checked calls";
}

// 8 --------------------------------------------------------------------------

void criterion8(Outcome& out) {
  int split_solved = 0;
  int base_solved = 0;
  int invalid = 0;
  double ratio = 0.0;
  for (int i = 0; i < kCombinedInstances; ++i) {
    const Instance inst = random_instance(128, 128, 0.05, 200, 8000 + static_cast<std::uint64_t>(i));
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kMakespan, kCombinedBudget);
    o.fallback = false;
    o.workers = 4;
    o.split = SplitKind::kTimeSpace;
    o.space.l = 2;
    o.space.m = 1;
    o.time.k = 2;
    o.time.seed = static_cast<std::uint64_t>(i);
    const PipelineResult s = run_pipeline(inst, o);
    if (s.solved()) {
      ++split_solved;
      if (!validate(inst, s.plan).ok()) ++invalid;
      ratio += compute_metrics(inst, s.plan).ratio_makespan;
    }
    o.split = SplitKind::kNone;
    const PipelineResult b = run_pipeline(inst, o);
    if (b.solved()) {
      ++base_solved;
      if (!validate(inst, b.plan).ok()) ++invalid;
    }
  }
  const double mean_ratio = split_solved ? ratio / split_solved : 0.0;
  out.pass = split_solved >= kCombinedSplitSolvedMin && base_solved <= kCombinedBaselineSolvedMax && invalid == 0 &&
             mean_ratio <= kCombinedRatioMax;
  out.detail << "2x1s2t solved " << split_solved << "/" << kCombinedInstances << ", unsplit solved " << base_solved
             << "/" << kCombinedInstances << " (needs <= " << kCombinedBaselineSolvedMax << "), " << invalid
             << " invalid, mean makespan ratio " << mean_ratio;
}

// 9 --------------------------------------------------------------------------

void criterion9(Outcome& out) {
  const std::string data = MAPFSPLIT_TEST_DATA;
  std::string ost;
  if (const char* env = std::getenv("MAPFSPLIT_OST003D")) ost = env;
  if (ost.empty() && std::filesystem::exists(data + "/ost003d.map")) ost = data + "/ost003d.map";
  if (ost.empty()) {
    out.pass = false;
    out.detail << "ost003d.map not available (set MAPFSPLIT_OST003D or add tests/data/ost003d.map); ";
  } else {
    const std::string text = read_text_file(ost);
    std::istringstream in(text);
    std::string line;
    int header = 0;
    int glyphs = 0;
    while (std::getline(in, line)) {
      if (header < 4) {
        ++header;
        continue;
      }
      glyphs += static_cast<int>(std::count(line.begin(), line.end(), '.') + std::count(line.begin(), line.end(), 'G'));
    }
    const GridGraph g = parse_map(text);
    const bool ok = g.width() == 194 && g.height() == 194 && g.vertex_count() == glyphs;
    out.pass = ok;
    out.detail << "ost003d " << g.width() << "x" << g.height() << ", passable " << g.vertex_count() << " vs glyphs "
               << glyphs << "; ";
  }
  struct Fixture {
    const char* file;
    std::size_t line;
  };
  const Fixture fixtures[] = {{"short-rows.map", 7},   {"unknown-glyph.map", 6}, {"row-length.map", 6},
                              {"missing-type.map", 1}, {"bad-height.map", 2},    {"bad-version.scen", 1},
                              {"short-entry.scen", 2}};
  int wrong = 0;
  for (const Fixture& f : fixtures) {
    const std::string path = data + "/malformed/" + f.file;
    const std::string text = read_text_file(path);
    std::size_t got = 0;
    try {
      if (std::string(f.file).ends_with(".map")) {
        parse_map(text);
      } else {
        parse_scenario_file(text);
      }
    } catch (const ParseError& e) {
      got = e.line();
    }
    if (got != f.line) ++wrong;
  }
  out.pass = out.pass && wrong == 0;
  out.detail << std::size(fixtures) << " malformed fixtures, " << wrong << " with the wrong or no parse error";
}

// 10 -------------------------------------------------------------------------

void criterion10(Outcome& out) {
  int diffs = 0;
  const Instance inst = random_instance(32, 32, 0.10, 40, 10000);
  for (const char* label : {"none", "2t", "4t", "2x1s", "2x1s2t", "2x2s"}) {
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kMakespan);
    o.time.seed = 9;
    o.workers = 4;
    apply_strategy_label(label, o);
    const PipelineResult a = run_pipeline(inst, o);
    const PipelineResult b = run_pipeline(inst, o);
    if (a.status != b.status || a.plan != b.plan || a.stats.strategy != b.stats.strategy) ++diffs;
  }
  if (!(generate_random(32, 32, 0.1, 60, 3) == generate_random(32, 32, 0.1, 60, 3))) ++diffs;

  ExperimentConfig c;
  c.source.width = 24;
  c.source.height = 24;
  c.agents = {10, 20};
  c.trials = 2;
  c.seed = 5;
  for (const char* label : {"none", "2t", "2x1s"}) {
    PipelineOptions o;
    o.solver = solver(1.5, Objective::kSumOfCosts);
    o.workers = 2;
    apply_strategy_label(label, o);
    c.variants.push_back(o);
  }
  auto rows = [&] {
    std::vector<std::string> out;
    for (RunRecord r : run_experiment(c)) {
      r.wall_ms = 0.0;
      out.push_back(csv_row(r));
    }
    return out;
  };
  const auto first = rows();
  const auto second = rows();
  if (first != second) ++diffs;
  out.pass = diffs == 0;
  out.detail << "6 strategies re-run, generator re-run, " << first.size() << "-row sweep re-run; " << diffs
             << " differences";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void(Outcome&)>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8,
                                                               criterion9, criterion10};
  std::set<int> selected;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--strict") strict = true;
    else selected.insert(std::atoi(argv[i]));
  }
  int failed = 0;
  for (int id = 1; id <= static_cast<int>(criteria.size()); ++id) {
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[static_cast<std::size_t>(id - 1)](out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s - %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", out.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return strict && failed > 0 ? 1 : 0;
}
