#include "ocl/solver_lv.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "ocl/clustering.hpp"
#include "ocl/estimation.hpp"
#include "ocl/oracle.hpp"

namespace ocl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Per-cluster histograms kept in step with the clustering so that a
// membership score costs O(q) instead of O(|C|^2).
class LvState {
 public:
  explicit LvState(const Instance& instance)
      : instance_(instance), q_(instance.q()), clustering_(instance.n) {}

  const ClusteringState& clustering() const { return clustering_; }
  ClusteringState& clustering() { return clustering_; }

  void open(Element v) {
    const ClusterId c = clustering_.open_cluster(v);
    inter_.emplace_back(instance_.n * q_, 0u);
    intra_.emplace_back(q_, 0u);
    scores_.emplace_back(instance_.n, 0.0);
    scored_size_.push_back(0);
    record_inter(c, v);
  }

  void join(ClusterId c, Element v) {
    for (Element m : clustering_.members(c)) ++intra_[c][instance_.w(m, v)];
    clustering_.add(c, v);
    record_inter(c, v);
  }

  /// Membership of every unclustered element against c, recomputed only
  /// when c has changed size since the last call.
  const std::vector<double>& scores(ClusterId c) {
    if (scored_size_[c] != clustering_.size(c)) {
      for (Element v : clustering_.unclustered()) {
        scores_[c][v] = membership_from_counts(
            std::span<const std::uint32_t>(inter_[c]).subspan(std::size_t{v} * q_, q_), intra_[c]);
      }
      scored_size_[c] = clustering_.size(c);
    }
    return scores_[c];
  }

 private:
  void record_inter(ClusterId c, Element u) {
    auto& counts = inter_[c];
    for (Element v : clustering_.unclustered()) ++counts[std::size_t{v} * q_ + instance_.w(u, v)];
  }

  const Instance& instance_;
  std::size_t q_;
  ClusteringState clustering_;
  std::vector<std::vector<std::uint32_t>> inter_;
  std::vector<std::vector<std::uint64_t>> intra_;
  std::vector<std::vector<double>> scores_;
  std::vector<std::size_t> scored_size_;
};

}  // namespace

std::size_t size_group(std::size_t size, std::size_t largest) {
  std::size_t group = 1;
  // size > largest / 2^group  <=>  size * 2^group > largest
  std::size_t scaled = size * 2;
  while (scaled <= largest) {
    scaled *= 2;
    ++group;
  }
  return group;
}

SolverOutput run_lv(const Instance& instance, std::uint64_t seed, std::ostream* query_log) {
  const auto start = Clock::now();
  Oracle oracle(instance);
  oracle.set_log(query_log);
  std::mt19937_64 rng(seed);
  LvState state(instance);
  std::vector<std::uint32_t> vertex_queries(instance.n, 0);

  while (state.clustering().unclustered_count() > 0) {
    const ClusteringState& cs = state.clustering();
    const std::vector<ClusterId> order = cs.by_size_desc();
    std::vector<std::size_t> ranked;  // positions in `order` of clusters with size >= 2
    for (std::size_t pos = 0; pos < order.size() && cs.size(order[pos]) >= 2; ++pos) {
      ranked.push_back(pos);
    }

    Element v = 0;
    std::optional<std::size_t> first_pos;
    if (ranked.empty()) {
      const auto pool = cs.unclustered();
      v = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    } else {
      std::vector<const std::vector<double>*> score_cols;
      for (std::size_t pos : ranked) score_cols.push_back(&state.scores(order[pos]));
      std::size_t best_rank = std::numeric_limits<std::size_t>::max();
      Element best_v = std::numeric_limits<Element>::max();
      for (Element u : cs.unclustered()) {
        std::size_t arg = 0;
        double top = (*score_cols[0])[u];
        for (std::size_t r = 1; r < ranked.size(); ++r) {
          if ((*score_cols[r])[u] > top) {
            top = (*score_cols[r])[u];
            arg = r;
          }
        }
        if (arg < best_rank || (arg == best_rank && u < best_v)) {
          best_rank = arg;
          best_v = u;
        }
      }
      v = best_v;
      first_pos = ranked[best_rank];
    }

    const std::uint64_t before = oracle.count();
    std::vector<bool> tried(order.size(), false);
    std::optional<ClusterId> home;
    auto ask = [&](std::size_t pos) {
      tried[pos] = true;
      if (oracle.same(v, cs.representative(order[pos]))) home = order[pos];
    };

    if (first_pos) {
      ask(*first_pos);
      if (!home && *first_pos > 0) {
        // Best-scoring cluster of each dyadic size group among the
        // clusters ahead of the first choice.
        const std::size_t largest = cs.size(order[0]);
        std::map<std::size_t, std::size_t> group_pick;  // group -> position
        for (std::size_t pos = 0; pos < *first_pos; ++pos) {
          if (cs.size(order[pos]) < 2) continue;
          const std::size_t g = size_group(cs.size(order[pos]), largest);
          const double s = state.scores(order[pos])[v];
          auto it = group_pick.find(g);
          if (it == group_pick.end() || s > state.scores(order[it->second])[v]) group_pick[g] = pos;
        }
        for (const auto& [g, pos] : group_pick) {
          ask(pos);
          if (home) break;
        }
      }
    }
    for (std::size_t pos = 0; !home && pos < order.size(); ++pos) {
      if (!tried[pos]) ask(pos);
    }

    if (home) {
      state.join(*home, v);
    } else {
      state.open(v);
    }
    vertex_queries[v] = static_cast<std::uint32_t>(oracle.count() - before);
  }

  RunReport report;
  report.algo = "lv";
  report.seed = seed;
  report.queries = oracle.count();
  score(report, state.clustering(), instance);
  report.wall_ms = elapsed_ms(start);
  return {std::move(state.clustering()), std::move(report), std::move(vertex_queries)};
}

SolverOutput run_baseline(const Instance& instance, std::uint64_t seed, std::ostream* query_log) {
  const auto start = Clock::now();
  Oracle oracle(instance);
  oracle.set_log(query_log);
  std::mt19937_64 rng(seed);
  std::vector<Element> order(instance.n);
  std::iota(order.begin(), order.end(), Element{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
  }

  ClusteringState state(instance.n);
  std::vector<std::uint32_t> vertex_queries(instance.n, 0);
  for (Element v : order) {
    const std::uint64_t before = oracle.count();
    std::optional<ClusterId> home;
    for (ClusterId c = 0; c < state.num_clusters(); ++c) {
      if (oracle.same(v, state.representative(c))) {
        home = c;
        break;
      }
    }
    if (home) {
      state.add(*home, v);
    } else {
      state.open_cluster(v);
    }
    vertex_queries[v] = static_cast<std::uint32_t>(oracle.count() - before);
  }

  RunReport report;
  report.algo = "baseline";
  report.seed = seed;
  report.queries = oracle.count();
  score(report, state, instance);
  report.wall_ms = elapsed_ms(start);
  return {std::move(state), std::move(report), std::move(vertex_queries)};
}

}  // namespace ocl
