#include "mapfsplit/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "mapfsplit/errors.hpp"
#include "mapfsplit/validation.hpp"

namespace mapfsplit {

const char* to_string(SplitKind s) noexcept {
  switch (s) {
    case SplitKind::kNone: return "none";
    case SplitKind::kTime: return "time";
    case SplitKind::kSpace: return "space";
    case SplitKind::kTimeSpace: return "time-space";
  }
  return "?";
}

std::string strategy_label(const PipelineOptions& o) {
  const std::string t = std::to_string(o.time.k) + "t";
  const std::string s = std::to_string(o.space.l) + "x" + std::to_string(o.space.m) + "s";
  switch (o.split) {
    case SplitKind::kNone: return "none";
    case SplitKind::kTime: return t;
    case SplitKind::kSpace: return s;
    case SplitKind::kTimeSpace: return s + t;
  }
  return "none";
}

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_deadline(const SolverOptions& sub) {
  if (sub.deadline && Clock::now() >= *sub.deadline) throw TimeoutError("pipeline deadline");
}

std::vector<Plan> solve_batch(const std::vector<Instance>& batch, const SolverOptions& sub, std::size_t workers,
                              PipelineStats* stats) {
  check_deadline(sub);
  const auto t0 = Clock::now();
  const BatchResult out = solve_parallel_batch(batch, sub, workers);
  if (stats) {
    stats->subsolve_ms += ms_since(t0);
    stats->subproblems += batch.size();
  }
  std::vector<Plan> plans;
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const SolveResult& r = out.results[i];
    if (stats) stats->expanded += r.stats.expanded;
    if (!r.solved()) {
      check_deadline(sub);
      throw SplitError("sub-problem " + std::to_string(i + 1) + " " + to_string(r.status) +
                       (r.message.empty() ? "" : ": " + r.message));
    }
    plans.push_back(r.plan);
  }
  return plans;
}

Plan time_split_solve(const Instance& inst, const TimeSplitSpec& spec, const SolverOptions& sub,
                      std::size_t workers, PipelineStats& stats) {
  const auto t0 = Clock::now();
  const IntermediateConfigs cfg = compute_intermediate_configs(inst, spec);
  const auto parts = split_instance(inst, cfg);
  stats.split_ms += ms_since(t0);
  stats.redraws += cfg.redraws;
  return concatenate(solve_batch(parts, sub, workers, &stats));
}

}  // namespace

Plan solve_phase_plan(const Instance& inst, const PhasePlan& plan, const SolverOptions& sub,
                      std::size_t workers, const TimeSplitSpec* time, PipelineStats* stats) {
  std::vector<Plan> rounds;
  for (const Phase& phase : plan.schedule) {
    const auto t0 = Clock::now();
    std::vector<Instance> batch;
    std::vector<std::size_t> first;  // batch index of each task's first part
    for (const RegionTask& task : phase.tasks) {
      first.push_back(batch.size());
      if (time) {
        TimeSplitSpec spec = *time;
        spec.seed = time->seed + 1000003ULL * static_cast<std::uint64_t>(phase.index * 1009 + task.region + 1);
        const IntermediateConfigs cfg = compute_intermediate_configs(task.instance, spec);
        if (stats) stats->redraws += cfg.redraws;
        for (Instance& part : split_instance(task.instance, cfg)) batch.push_back(std::move(part));
      } else {
        batch.push_back(task.instance);
      }
    }
    first.push_back(batch.size());
    if (stats) stats->split_ms += ms_since(t0);

    const std::vector<Plan> plans = solve_batch(batch, sub, workers, stats);
    std::vector<Path> paths(inst.size());
    for (std::size_t t = 0; t < phase.tasks.size(); ++t) {
      const std::vector<Plan> parts(plans.begin() + static_cast<std::ptrdiff_t>(first[t]),
                                    plans.begin() + static_cast<std::ptrdiff_t>(first[t + 1]));
      const Plan joined = parts.size() == 1 ? parts.front() : concatenate(parts);
      const RegionTask& task = phase.tasks[t];
      for (std::size_t k = 0; k < task.robots.size(); ++k) paths[task.robots[k]] = joined.paths[k];
    }
    rounds.push_back(Plan::from_paths(std::move(paths)));
  }
  return concatenate(rounds);
}

PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& options) {
  if (options.solver.w < 1.0) throw DomainError("w must be >= 1");
  if (options.split == SplitKind::kTime || options.split == SplitKind::kTimeSpace) validate_spec(options.time);
  const auto start = Clock::now();
  Clock::time_point deadline = start + options.solver.budget.time_limit;
  if (options.solver.deadline) deadline = std::min(deadline, *options.solver.deadline);
  SolverOptions sub = options.solver;
  sub.deadline = deadline;

  PipelineResult res;
  PipelineStats& st = res.stats;
  st.workers = std::max<std::size_t>(1, options.workers);
  std::optional<Plan> plan;

  auto note = [&](const std::string& what, const std::exception& e) {
    st.fallbacks.push_back(what + ": " + e.what());
  };
  auto try_time = [&](const TimeSplitSpec& base) {
    const int attempts = options.fallback ? 2 : 1;
    for (int a = 0; a < attempts && !plan; ++a) {
      TimeSplitSpec spec = base;
      if (a > 0) spec.seed = base.seed ^ 0x9e3779b97f4a7c15ULL;
      st.subproblems = 0;
      try {
        plan = time_split_solve(inst, spec, sub, st.workers, st);
        st.strategy = std::to_string(spec.k) + "t";
        st.phases = spec.k;
      } catch (const SplitError& e) {
        note(std::to_string(spec.k) + "t", e);
      } catch (const ConcatenationError& e) {
        note(std::to_string(spec.k) + "t", e);
      }
    }
  };
  auto try_space = [&](const TimeSplitSpec* time) {
    const std::string label =
        std::to_string(options.space.l) + "x" + std::to_string(options.space.m) + "s" +
        (time ? std::to_string(time->k) + "t" : "");
    std::optional<SpacePartition> part;
    try {
      const auto t0 = Clock::now();
      part = build_partition(inst.graph_ptr(), options.space.l, options.space.m, options.space.buffer);
      st.split_ms += ms_since(t0);
    } catch (const PartitionError& e) {
      note(label, e);
      return;
    }
    SpaceSplitOptions so;
    so.lambda1 = options.space.lambda1;
    so.lambda2 = options.space.lambda2;
    so.observer = options.observer;
    int k = options.space.phases;
    if (k == 0) {
      const auto minimal = minimal_phases(*part, inst);
      if (!minimal) {
        st.fallbacks.push_back(label + ": no phase count up to l+m routes every robot");
        return;
      }
      k = *minimal;
    }
    const int last = options.fallback ? std::max(k, options.space.l + options.space.m) : k;
    for (; k <= last && !plan; ++k) {
      so.phases = k;
      st.subproblems = 0;
      try {
        const auto t0 = Clock::now();
        const PhasePlan phases = plan_phases(inst, *part, so);
        st.split_ms += ms_since(t0);
        plan = solve_phase_plan(inst, phases, sub, st.workers, time, &st);
        st.strategy = label;
        st.phases = k * (time ? time->k : 1);
      } catch (const SplitError& e) {
        note(label + " k=" + std::to_string(k), e);
      } catch (const ConcatenationError& e) {
        note(label + " k=" + std::to_string(k), e);
      }
    }
  };

  try {
    TimeSplitSpec time = options.time;
    switch (options.split) {
      case SplitKind::kNone: break;
      case SplitKind::kTime: try_time(time); break;
      case SplitKind::kSpace: try_space(nullptr); break;
      case SplitKind::kTimeSpace:
        try_space(&time);
        if (!plan && options.fallback) try_time(time);
        break;
    }
    if (!plan && (options.split == SplitKind::kNone || options.fallback)) {
      check_deadline(sub);
      const auto t0 = Clock::now();
      const SolveResult r = solve(inst, sub);
      st.subsolve_ms += ms_since(t0);
      st.expanded += r.stats.expanded;
      st.subproblems = 1;
      st.phases = 1;
      st.strategy = "none";
      if (r.solved()) {
        plan = r.plan;
      } else {
        res.status = Clock::now() >= deadline ? SolveStatus::kTimeout : r.status;
        res.message = r.message;
      }
    } else if (!plan) {
      res.status = SolveStatus::kFailed;
      res.message = st.fallbacks.empty() ? "split failed" : st.fallbacks.back();
    }
  } catch (const TimeoutError& e) {
    res.status = SolveStatus::kTimeout;
    res.message = e.what();
    plan.reset();
  }

  if (plan) {
    const ValidationReport report = validate(inst, *plan);
    if (report.ok()) {
      res.status = SolveStatus::kSolved;
      res.plan = std::move(*plan);
    } else {
      res.status = SolveStatus::kFailed;
      res.message = "assembled plan is invalid: " + report.violations.front().message;
    }
  }
  st.wall_ms = ms_since(start);
  return res;
}

}  // namespace mapfsplit

namespace mapfsplit {

void apply_strategy_label(const std::string& label, PipelineOptions& options) {
  if (label == "none") {
    options.split = SplitKind::kNone;
    return;
  }
  int l = 0;
  int m = 0;
  int k = 0;
  auto whole = [&](int consumed) { return consumed == static_cast<int>(label.size()); };
  int used = 0;
  if (std::sscanf(label.c_str(), "%dt%n", &k, &used) == 1 && whole(used) && k >= 2) {
    options.split = SplitKind::kTime;
    options.time.k = k;
    return;
  }
  used = 0;
  if (std::sscanf(label.c_str(), "%dx%ds%n", &l, &m, &used) == 2 && whole(used) && l >= 1 && m >= 1) {
    options.split = SplitKind::kSpace;
    options.space.l = l;
    options.space.m = m;
    return;
  }
  used = 0;
  if (std::sscanf(label.c_str(), "%dx%ds%dt%n", &l, &m, &k, &used) == 3 && whole(used) && l >= 1 && m >= 1 &&
      k >= 2) {
    options.split = SplitKind::kTimeSpace;
    options.space.l = l;
    options.space.m = m;
    options.time.k = k;
    return;
  }
  throw DomainError("unknown split strategy '" + label + "' (none, <k>t, <l>x<m>s, <l>x<m>s<k>t)");
}

}  // namespace mapfsplit
