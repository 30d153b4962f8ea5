// Per-run result record shared by every solver and the benchmark harness.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "ocl/clustering.hpp"

namespace ocl {

struct PhaseQueries {
  std::uint64_t phase1 = 0;
  std::uint64_t phase2 = 0;
  std::uint64_t phase3 = 0;
  bool operator==(const PhaseQueries&) const = default;
};

/// Constants a Monte Carlo run actually used.
struct EffectiveConstants {
  double c = 0.0;
  double c_prime = 0.0;
  double b = 0.0;
  double scale = 0.0;
  std::string band;
  bool operator==(const EffectiveConstants&) const = default;
};

struct RunReport {
  std::string algo;
  std::string instance;  // fingerprint
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  PhaseQueries phases;
  bool exact = false;
  std::uint64_t misassigned = 0;
  double wall_ms = 0.0;
  std::optional<EffectiveConstants> constants;
  /// Final Hellinger estimate and grown-cluster threshold (Monte Carlo);
  /// an absent threshold on an MC run means it stayed unbounded.
  std::optional<double> h_estimate;
  std::optional<std::uint64_t> m_threshold;
  std::uint64_t waiting = 0;

  bool operator==(const RunReport&) const = default;
};

/// Fills the exactness fields from a finished clustering.
void score(RunReport& report, const ClusteringState& state, const Instance& instance);

void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

/// A finished solver run.
struct SolverOutput {
  ClusteringState clustering;
  RunReport report;
  /// Queries charged while placing each element (indexed by element id).
  std::vector<std::uint32_t> vertex_queries;
};

}  // namespace ocl
