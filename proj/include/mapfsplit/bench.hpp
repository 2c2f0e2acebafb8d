#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mapfsplit/pipeline.hpp"

namespace mapfsplit {

/// A map file (with an optional scenario) or a random grid spec.
struct MapSource {
  std::string map_path;
  std::string scen_path;
  int width = 32;
  int height = 32;
  double obstacles = 0.10;
};

struct ExperimentConfig {
  MapSource source;
  std::vector<std::size_t> agents;  // positive, ascending
  int trials = 1;
  std::uint64_t seed = 0;
  /// One run per variant per instance; time.seed is replaced by the
  /// instance seed.
  std::vector<PipelineOptions> variants;
};

/// Throws DomainError on an empty sweep, unsorted or zero agent counts,
/// trials < 1 or no variants.
void validate_config(const ExperimentConfig& config);

/// Seed of trial t (0-based) at agent count n.
std::uint64_t instance_seed(std::uint64_t base, std::size_t n, int trial);

struct RunRecord {
  std::string instance;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string solver;  // cbs or ecbs
  double w = 1.0;
  std::string split;   // the requested strategy label
  int phases = 0;
  std::size_t subproblems = 0;
  std::size_t workers = 1;
  bool solved = false;
  double wall_ms = 0.0;
  std::optional<int> makespan;
  std::optional<int> soc;
  int lb_mk = 0;
  int lb_soc = 0;
  std::optional<double> ratio_mk;
  std::optional<double> ratio_soc;
  // Not part of the per-run CSV.
  double split_ms = 0.0;
  double subsolve_ms = 0.0;
  std::string status;
  std::string message;
};

std::string solver_name(double w);

/// Runs the sweep sequentially. Every plan counted as solved has passed the
/// validator; failures are recorded and the sweep goes on.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const RunRecord&)>& on_record = nullptr);

std::string csv_header();
std::string csv_row(const RunRecord& r);

/// Per (n, solver, w, split) means over the runs of one sweep.
struct SummaryRow {
  std::size_t n = 0;
  std::string solver;
  double w = 1.0;
  std::string split;
  std::size_t runs = 0;
  std::size_t solved = 0;
  double mean_wall_ms = 0.0;
  double median_wall_ms = 0.0;
  double mean_split_ms = 0.0;
  double mean_subsolve_ms = 0.0;
  std::optional<double> mean_ratio_mk;  // solved runs only
  std::optional<double> mean_ratio_soc;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
std::string summary_header();
std::string summary_row(const SummaryRow& s);

}  // namespace mapfsplit
