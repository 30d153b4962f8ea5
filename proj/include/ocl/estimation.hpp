// Empirical inter/intra distributions, the membership score, and the pooled
// same/different-cluster estimates that drive the grown-cluster threshold.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ocl/clustering.hpp"
#include "ocl/divergence.hpp"
#include "ocl/instance.hpp"

namespace ocl {

class EstimationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Constants of the threshold and band formulas. Sizes use the effective
/// constant scale * c; the band constant b() uses the unscaled c.
struct Constants {
  double c = 118.0;
  double c_prime = 3.0;
  double scale = 1.0;

  double b() const;
  double effective_c() const { return scale * c; }
  /// Throws EstimationError unless c >= 36 c', c' >= 3 and scale > 0.
  void validate() const;
};

/// Empty optional means "unbounded": keep querying.
using SizeThreshold = std::optional<std::size_t>;

struct Estimates {
  std::optional<Distribution> p_plus;
  std::optional<Distribution> p_minus;
  double h = 0.0;
  SizeThreshold m_threshold;
  std::uint64_t intra_pairs = 0;
  std::uint64_t inter_pairs = 0;
};

/// ceil(scale * c * ln n), at least 1.
std::size_t initial_target(const Constants& consts, std::size_t n);
/// ceil(scale * c * ln n / h^2) capped at n; unbounded when h == 0.
SizeThreshold m_threshold(double h, const Constants& consts, std::size_t n);

/// p_{v,C}: distribution of w(u, v) over u in C.
Distribution inter_dist(Element v, std::span<const Element> cluster, const Instance& instance);
/// p_C: distribution of w over unordered pairs inside C (|C| >= 2).
Distribution intra_dist(std::span<const Element> cluster, const Instance& instance);
/// -H^2(p_{v,C} || p_C), in [-1, 0].
double membership(Element v, std::span<const Element> cluster, const Instance& instance);

/// Membership from raw histograms: `inter` counts w(u, v) over members,
/// `intra` counts w over member pairs. Both must be nonempty.
double membership_from_counts(std::span<const std::uint32_t> inter,
                              std::span<const std::uint64_t> intra);

/// Pools every within-cluster pair into p_plus and every cross-cluster pair
/// into p_minus.
Estimates pooled_estimates(const ClusteringState& state, const Instance& instance,
                           const Constants& consts);

/// Incremental version of pooled_estimates. Call on_join() each time an
/// element enters a cluster (after ClusteringState::add/open_cluster).
class PairTally {
 public:
  explicit PairTally(std::size_t q) : intra_(q, 0), inter_(q, 0) {}

  void on_join(const ClusteringState& state, Element v, const Instance& instance);
  Estimates estimates(const Instance& instance, const Constants& consts) const;

  std::span<const std::uint64_t> intra() const { return intra_; }
  std::span<const std::uint64_t> inter() const { return inter_; }

 private:
  std::vector<std::uint64_t> intra_;
  std::vector<std::uint64_t> inter_;
  std::vector<Element> clustered_;
};

}  // namespace ocl
