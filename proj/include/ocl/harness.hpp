// Benchmark sweeps: configuration, parallel trial execution, aggregation,
// and CSV / JSON / SVG emission.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ocl/divergence.hpp"
#include "ocl/instance.hpp"
#include "ocl/report.hpp"
#include "ocl/solver_mc.hpp"

namespace ocl {

/// Invalid configuration; the message starts with the offending path,
/// e.g. `config.constants.scale: must be positive`.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DistributionPair {
  Distribution f_plus;
  Distribution f_minus;
};

/// A sweep entry for the cluster layout. Balanced and skewed layouts are
/// crossed with the k axis; explicit sizes fix both n and k.
struct SpecTemplate {
  enum class Kind { Balanced, Skewed, Sizes } kind = Kind::Balanced;
  double ratio = 1.0;
  std::vector<std::size_t> sizes;
};

struct OutputPaths {
  std::filesystem::path dir = "bench_out";
  std::string csv = "runs.csv";
  std::string json = "runs.json";
  std::string svg = "queries.svg";
  std::string aggregate = "aggregate.csv";
};

struct ExperimentConfig {
  std::vector<std::size_t> n;
  std::vector<std::size_t> k;
  std::vector<SpecTemplate> specs{SpecTemplate{}};
  std::vector<DistributionPair> distributions;
  std::vector<std::string> algorithms{"mc", "lv", "baseline"};
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  McConfig mc;
  unsigned threads = 0;  // 0: hardware concurrency
  bool record_time = false;
  double min_mc_success = 0.9;
  OutputPaths output;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Re-checks every invariant; throws ConfigError.
void validate(const ExperimentConfig& config);

struct Cell {
  std::size_t index = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  ClusterSpec spec;
  std::size_t distribution = 0;
};
std::vector<Cell> expand_cells(const ExperimentConfig& config);

/// Seed of trial `trial` in cell `cell`.
std::uint64_t trial_seed(std::uint64_t base, std::size_t cell, std::size_t trial);

struct Summary {
  std::size_t trials = 0;
  double median_queries = 0.0;
  double mean_queries = 0.0;
  double ci_low = 0.0;  // normal-approximation 95% interval of the mean
  double ci_high = 0.0;
  double success_rate = 0.0;
};
Summary summarize(std::span<const RunReport> reports);

struct AggregateRow {
  std::string algo;
  std::size_t cell = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string spec;
  std::string f_plus;
  std::string f_minus;
  Summary summary;
  double lb_budget = 0.0;
};

struct ExperimentResult {
  std::vector<RunReport> reports;    // cell-major, then trial, then algorithm
  std::vector<std::size_t> cell_of;  // parallel to reports
  std::vector<AggregateRow> aggregates;
};

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// OCL_THREADS environment variable when set.
unsigned worker_count(unsigned requested);

/// Runs every (cell, trial, algorithm). Results do not depend on `threads`.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads);

/// Fixed-order run table: algo,n,k,seed,queries,q_phase1,q_phase2,q_phase3,
/// exact,misassigned,ms. `ms` is written as 0 unless record_time is set.
std::string runs_csv(std::span<const RunReport> reports, bool record_time);
std::vector<RunReport> parse_runs_csv(std::string_view text);
std::string aggregate_csv(std::span<const AggregateRow> rows);
nlohmann::json experiment_json(const ExperimentResult& result);
std::vector<RunReport> reports_from_json(const nlohmann::json& j);
/// Median queries against n, one polyline per algorithm, plus the
/// lower-bound budget curve.
std::string queries_svg(const ExperimentResult& result);

/// Writes all four artifacts under config.output.dir.
void emit(const ExperimentResult& result, const ExperimentConfig& config);

/// Gate used by `bench --check`: exact Las Vegas / baseline runs within the
/// nk cap, and Monte Carlo success rate per cell at least min_mc_success.
/// Returns one message per violation.
std::vector<std::string> check_gate(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace ocl
