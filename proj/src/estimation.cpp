#include "ocl/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace ocl {

namespace {

Estimates finish(std::span<const std::uint64_t> intra, std::span<const std::uint64_t> inter,
                 const Instance& instance, const Constants& consts) {
  Estimates e;
  e.intra_pairs = std::accumulate(intra.begin(), intra.end(), std::uint64_t{0});
  e.inter_pairs = std::accumulate(inter.begin(), inter.end(), std::uint64_t{0});
  auto to_dist = [&](std::span<const std::uint64_t> counts) {
    std::vector<double> c(counts.begin(), counts.end());
    return Distribution::from_counts(instance.f_plus.support_ptr(), c);
  };
  if (e.intra_pairs > 0) e.p_plus = to_dist(intra);
  if (e.inter_pairs > 0) e.p_minus = to_dist(inter);
  if (e.p_plus && e.p_minus) {
    e.h = hellinger(*e.p_plus, *e.p_minus);
    e.m_threshold = m_threshold(e.h, consts, instance.n);
  }
  return e;
}

}  // namespace

double Constants::b() const { return std::sqrt(c / c_prime); }

void Constants::validate() const {
  if (!(c_prime >= 3.0)) throw EstimationError("c_prime must be >= 3");
  if (!(c >= 36.0 * c_prime)) throw EstimationError("c must be >= 36 * c_prime (so that B >= 6)");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw EstimationError("scale must be positive");
}

std::size_t initial_target(const Constants& consts, std::size_t n) {
  if (n < 2) return 1;
  const double t = std::ceil(consts.effective_c() * std::log(static_cast<double>(n)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

SizeThreshold m_threshold(double h, const Constants& consts, std::size_t n) {
  if (!(h > 0.0)) return std::nullopt;
  const double raw =
      std::ceil(consts.effective_c() * std::log(static_cast<double>(std::max<std::size_t>(n, 1))) /
                (h * h));
  if (!(raw < static_cast<double>(n))) return n;
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

Distribution inter_dist(Element v, std::span<const Element> cluster, const Instance& instance) {
  if (cluster.empty()) throw EstimationError("inter_dist on empty cluster");
  std::vector<double> counts(instance.q(), 0.0);
  for (Element u : cluster) {
    if (u == v) throw EstimationError("inter_dist: element belongs to the cluster");
    counts[instance.w(u, v)] += 1.0;
  }
  return Distribution::from_counts(instance.f_plus.support_ptr(), counts);
}

Distribution intra_dist(std::span<const Element> cluster, const Instance& instance) {
  if (cluster.size() < 2) throw EstimationError("intra_dist needs at least 2 members");
  std::vector<double> counts(instance.q(), 0.0);
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    for (std::size_t j = i + 1; j < cluster.size(); ++j) {
      if (cluster[i] == cluster[j]) throw EstimationError("intra_dist: repeated member");
      counts[instance.w(cluster[i], cluster[j])] += 1.0;
    }
  }
  return Distribution::from_counts(instance.f_plus.support_ptr(), counts);
}

double membership(Element v, std::span<const Element> cluster, const Instance& instance) {
  if (cluster.size() < 2) throw EstimationError("membership needs a cluster of size >= 2");
  return -hellinger2(inter_dist(v, cluster, instance), intra_dist(cluster, instance));
}

double membership_from_counts(std::span<const std::uint32_t> inter,
                              std::span<const std::uint64_t> intra) {
  std::array<double, 256> f{};
  std::array<double, 256> g{};
  const std::size_t q = inter.size();
  double fs = 0.0;
  double gs = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    fs += inter[i];
    gs += static_cast<double>(intra[i]);
  }
  for (std::size_t i = 0; i < q; ++i) {
    f[i] = inter[i] / fs;
    g[i] = static_cast<double>(intra[i]) / gs;
  }
  return -hellinger2_probs(std::span(f).first(q), std::span(g).first(q));
}

Estimates pooled_estimates(const ClusteringState& state, const Instance& instance,
                           const Constants& consts) {
  const std::size_t q = instance.q();
  std::vector<std::uint64_t> intra(q, 0);
  std::vector<std::uint64_t> inter(q, 0);
  std::vector<Element> clustered;
  for (Element v = 0; v < state.n(); ++v) {
    if (state.clustered(v)) clustered.push_back(v);
  }
  for (std::size_t i = 0; i < clustered.size(); ++i) {
    for (std::size_t j = i + 1; j < clustered.size(); ++j) {
      const Element u = clustered[i];
      const Element v = clustered[j];
      auto& bucket = state.cluster_of(u) == state.cluster_of(v) ? intra : inter;
      ++bucket[instance.w(u, v)];
    }
  }
  return finish(intra, inter, instance, consts);
}

void PairTally::on_join(const ClusteringState& state, Element v, const Instance& instance) {
  const ClusterId c = state.cluster_of(v);
  for (Element u : clustered_) {
    auto& bucket = state.cluster_of(u) == c ? intra_ : inter_;
    ++bucket[instance.w(u, v)];
  }
  clustered_.push_back(v);
}

Estimates PairTally::estimates(const Instance& instance, const Constants& consts) const {
  return finish(intra_, inter_, instance, consts);
}

}  // namespace ocl
