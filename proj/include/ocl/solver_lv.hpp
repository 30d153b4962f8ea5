// Las Vegas clustering (always exact; side information only decides the
// order in which clusters are queried) and the query-only baseline.
#pragma once

#include <cstdint>
#include <ostream>

#include "ocl/instance.hpp"
#include "ocl/report.hpp"

namespace ocl {

/// Repeatedly picks the unclustered element whose best-scoring cluster comes
/// earliest in size order, queries that cluster, then the best cluster of
/// each dyadic size group ahead of it, then everything else.
SolverOutput run_lv(const Instance& instance, std::uint64_t seed,
                    std::ostream* query_log = nullptr);

/// Elements in seeded random order, each queried against one member of
/// every existing cluster until a +1 (else a new singleton).
SolverOutput run_baseline(const Instance& instance, std::uint64_t seed,
                          std::ostream* query_log = nullptr);

/// Dyadic group index (1-based) of a cluster of size `size` when the
/// largest cluster has size `largest`: the i with size in
/// (largest / 2^i, largest / 2^(i-1)].
std::size_t size_group(std::size_t size, std::size_t largest);

}  // namespace ocl
