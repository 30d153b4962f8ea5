// Partial partitions built up by the solvers, and comparison against a
// ground-truth labelling.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ocl/instance.hpp"

namespace ocl {

using ClusterId = std::uint32_t;
inline constexpr ClusterId kUnclustered = static_cast<ClusterId>(-1);

/// Disjoint clusters of element ids plus the pool of unclustered elements.
/// Cluster ids are dense and assigned in creation order.
class ClusteringState {
 public:
  explicit ClusteringState(std::size_t n);

  std::size_t n() const { return label_.size(); }
  std::size_t num_clusters() const { return members_.size(); }
  std::span<const Element> members(ClusterId c) const { return members_[c]; }
  std::size_t size(ClusterId c) const { return members_[c].size(); }
  /// Lowest-id member.
  Element representative(ClusterId c) const { return min_member_[c]; }

  ClusterId cluster_of(Element v) const { return label_[v]; }
  bool clustered(Element v) const { return label_[v] != kUnclustered; }

  /// Unclustered elements in unspecified order.
  std::span<const Element> unclustered() const { return pool_; }
  std::size_t unclustered_count() const { return pool_.size(); }
  std::size_t clustered_count() const { return n() - pool_.size(); }

  ClusterId open_cluster(Element v);
  void add(ClusterId c, Element v);

  /// Cluster ids ordered by size descending, ties by id.
  std::vector<ClusterId> by_size_desc() const;
  std::size_t max_cluster_size() const;

  /// Clusters as sorted member lists, ordered by smallest member.
  std::vector<std::vector<Element>> canonical() const;

 private:
  void take_from_pool(Element v);

  std::vector<ClusterId> label_;
  std::vector<std::vector<Element>> members_;
  std::vector<Element> min_member_;
  std::vector<Element> pool_;
  std::vector<std::size_t> pool_pos_;
};

/// Elements not covered by a maximum-overlap greedy matching between output
/// and truth clusters; 0 iff the (complete) clustering equals the truth.
/// Unclustered elements always count as misassigned.
std::size_t misassigned(const ClusteringState& state, std::span<const std::uint32_t> truth);

}  // namespace ocl
