#include "ocl/clustering.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace ocl {

ClusteringState::ClusteringState(std::size_t n)
    : label_(n, kUnclustered), pool_(n), pool_pos_(n) {
  std::iota(pool_.begin(), pool_.end(), Element{0});
  std::iota(pool_pos_.begin(), pool_pos_.end(), std::size_t{0});
}

void ClusteringState::take_from_pool(Element v) {
  if (label_[v] != kUnclustered) throw std::logic_error("element already clustered");
  const std::size_t pos = pool_pos_[v];
  const Element last = pool_.back();
  pool_[pos] = last;
  pool_pos_[last] = pos;
  pool_.pop_back();
}

ClusterId ClusteringState::open_cluster(Element v) {
  take_from_pool(v);
  const auto c = static_cast<ClusterId>(members_.size());
  members_.push_back({v});
  min_member_.push_back(v);
  label_[v] = c;
  return c;
}

void ClusteringState::add(ClusterId c, Element v) {
  take_from_pool(v);
  members_[c].push_back(v);
  min_member_[c] = std::min(min_member_[c], v);
  label_[v] = c;
}

std::vector<ClusterId> ClusteringState::by_size_desc() const {
  std::vector<ClusterId> order(members_.size());
  std::iota(order.begin(), order.end(), ClusterId{0});
  std::stable_sort(order.begin(), order.end(), [&](ClusterId a, ClusterId b) {
    return members_[a].size() > members_[b].size();
  });
  return order;
}

std::size_t ClusteringState::max_cluster_size() const {
  std::size_t best = 0;
  for (const auto& m : members_) best = std::max(best, m.size());
  return best;
}

std::vector<std::vector<Element>> ClusteringState::canonical() const {
  std::vector<std::vector<Element>> out(members_);
  for (auto& m : out) std::sort(m.begin(), m.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t misassigned(const ClusteringState& state, std::span<const std::uint32_t> truth) {
  // overlap[(output, truth)] = count
  std::map<std::pair<ClusterId, std::uint32_t>, std::size_t> overlap;
  for (Element v = 0; v < state.n(); ++v) {
    if (state.clustered(v)) ++overlap[{state.cluster_of(v), truth[v]}];
  }
  std::vector<std::tuple<std::size_t, ClusterId, std::uint32_t>> cells;
  cells.reserve(overlap.size());
  for (const auto& [key, count] : overlap) cells.emplace_back(count, key.first, key.second);
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<bool> out_used(state.num_clusters(), false);
  std::map<std::uint32_t, bool> truth_used;
  std::size_t matched = 0;
  for (const auto& [count, out_c, truth_c] : cells) {
    if (out_used[out_c] || truth_used[truth_c]) continue;
    out_used[out_c] = true;
    truth_used[truth_c] = true;
    matched += count;
  }
  return state.n() - matched;
}

}  // namespace ocl
