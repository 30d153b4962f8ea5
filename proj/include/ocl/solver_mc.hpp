// Parameter-free Monte Carlo clustering: query until one cluster is large,
// iteratively re-estimate the same/different-cluster distributions, then
// absorb the remaining elements of each grown cluster from side information
// alone, querying only the ambiguous band.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ocl/clustering.hpp"
#include "ocl/estimation.hpp"
#include "ocl/instance.hpp"
#include "ocl/oracle.hpp"
#include "ocl/report.hpp"

namespace ocl {

/// Which inclusion band Phase 3 uses. `Lemma` centres the band on h/B with
/// half-width 2h^2/(B sqrt(ln n)); `Text` centres it on 4h/c with
/// half-width 2h^2/(c sqrt(ln n)).
enum class BandForm { Lemma, Text };
std::string_view to_string(BandForm form);
BandForm parse_band(std::string_view text);

struct McConfig {
  Constants consts;
  BandForm band = BandForm::Lemma;
};

/// Membership cut-offs for one grown cluster. Elements scoring at least
/// `include_at` join without a query (only if `inclusion_enabled`); those
/// in [waiting_at, include_at) are queried.
struct Phase3Band {
  double include_at = 0.0;
  double waiting_at = 0.0;
  bool inclusion_enabled = false;
};
Phase3Band phase3_band(double h, const McConfig& config, std::size_t n);

enum class McPhase { Init, Iterate, Grow, Done };

struct McState {
  McState(const Instance& instance, std::uint64_t seed);

  ClusteringState clustering;
  McPhase phase = McPhase::Init;
  Estimates estimates;
  PairTally tally;
  std::vector<std::vector<Element>> waiting;  // per cluster id
  std::vector<bool> done;                     // completely grown
  std::mt19937_64 rng;
  PhaseQueries queries;
  std::size_t phase1_processed = 0;
  std::vector<std::uint32_t> vertex_queries;
  std::vector<bool> placed_without_query;
};

/// Query-only growth until some cluster reaches initial_target().
McState phase1(const Instance& instance, Oracle& oracle, const McConfig& config,
               std::uint64_t seed);
/// Re-estimate, then cluster one more element by querying; repeat until a
/// not-yet-done cluster reaches the current threshold or nothing is left.
void phase2_loop(McState& state, const Instance& instance, Oracle& oracle, const McConfig& config);
/// Processes every grown, not-yet-done cluster with the estimates frozen at
/// entry.
void phase3_process(McState& state, const Instance& instance, Oracle& oracle,
                    const McConfig& config);

SolverOutput run_mc(const Instance& instance, const McConfig& config, std::uint64_t seed,
                    std::ostream* query_log = nullptr);

}  // namespace ocl
