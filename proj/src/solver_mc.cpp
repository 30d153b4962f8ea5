#include "ocl/solver_mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ocl {

namespace {

Element pick_random(McState& state) {
  const auto pool = state.clustering.unclustered();
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(state.rng)];
}

void join(McState& state, ClusterId c, Element v, const Instance& instance) {
  state.clustering.add(c, v);
  state.tally.on_join(state.clustering, v, instance);
}

ClusterId open(McState& state, Element v, const Instance& instance) {
  const ClusterId c = state.clustering.open_cluster(v);
  state.waiting.emplace_back();
  state.done.push_back(false);
  state.tally.on_join(state.clustering, v, instance);
  return c;
}

// Queries v against one representative per cluster in `order`, joining the
// first that answers +1, else opening a singleton. Returns queries charged.
std::uint64_t place_by_query(McState& state, Element v, const std::vector<ClusterId>& order,
                             const Instance& instance, Oracle& oracle) {
  const std::uint64_t before = oracle.count();
  for (ClusterId c : order) {
    if (oracle.same(v, state.clustering.representative(c))) {
      join(state, c, v, instance);
      const auto spent = oracle.count() - before;
      state.vertex_queries[v] += static_cast<std::uint32_t>(spent);
      return spent;
    }
  }
  open(state, v, instance);
  const auto spent = oracle.count() - before;
  state.vertex_queries[v] += static_cast<std::uint32_t>(spent);
  return spent;
}

std::uint64_t place_random_by_query(McState& state, const Instance& instance, Oracle& oracle) {
  const Element v = pick_random(state);
  return place_by_query(state, v, state.clustering.by_size_desc(), instance, oracle);
}

std::optional<ClusterId> next_grown(const McState& state) {
  if (!state.estimates.m_threshold) return std::nullopt;
  const std::size_t threshold = *state.estimates.m_threshold;
  for (ClusterId c : state.clustering.by_size_desc()) {
    if (state.clustering.size(c) < threshold) break;
    if (!state.done[c]) return c;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(BandForm form) { return form == BandForm::Lemma ? "lemma" : "text"; }

BandForm parse_band(std::string_view text) {
  if (text == "lemma") return BandForm::Lemma;
  if (text == "text") return BandForm::Text;
  throw std::invalid_argument("band must be 'lemma' or 'text', got '" + std::string(text) + "'");
}

Phase3Band phase3_band(double h, const McConfig& config, std::size_t n) {
  const double log_n = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  const double denom = config.band == BandForm::Lemma ? config.consts.b() : config.consts.c;
  const double centre = (config.band == BandForm::Lemma ? h : 4.0 * h) / denom;
  const double half = log_n > 0.0 ? 2.0 * h * h / (denom * std::sqrt(log_n)) : centre;
  Phase3Band band;
  band.include_at = -(centre - half);
  band.waiting_at = -(centre + half);
  // Never include without evidence: a non-positive inner edge disables 3A.
  band.inclusion_enabled = centre - half > 0.0;
  return band;
}

McState::McState(const Instance& instance, std::uint64_t seed)
    : clustering(instance.n),
      tally(instance.q()),
      rng(seed),
      vertex_queries(instance.n, 0),
      placed_without_query(instance.n, false) {}

McState phase1(const Instance& instance, Oracle& oracle, const McConfig& config,
               std::uint64_t seed) {
  McState state(instance, seed);
  const std::size_t target = initial_target(config.consts, instance.n);
  while (state.clustering.unclustered_count() > 0 && state.clustering.max_cluster_size() < target) {
    state.queries.phase1 += place_random_by_query(state, instance, oracle);
    ++state.phase1_processed;
  }
  state.phase = state.clustering.unclustered_count() == 0 ? McPhase::Done : McPhase::Iterate;
  return state;
}

void phase2_loop(McState& state, const Instance& instance, Oracle& oracle, const McConfig& config) {
  state.phase = McPhase::Iterate;
  while (true) {
    state.estimates = state.tally.estimates(instance, config.consts);
    if (state.clustering.unclustered_count() == 0) {
      state.phase = McPhase::Done;
      return;
    }
    if (next_grown(state)) {
      state.phase = McPhase::Grow;
      return;
    }
    state.queries.phase2 += place_random_by_query(state, instance, oracle);
  }
}

void phase3_process(McState& state, const Instance& instance, Oracle& oracle,
                    const McConfig& config) {
  state.phase = McPhase::Grow;
  const Phase3Band band = phase3_band(state.estimates.h, config, instance.n);
  const std::size_t q = instance.q();

  while (auto grown = next_grown(state)) {
    const ClusterId c = *grown;
    if (state.clustering.unclustered_count() == 0) {
      state.done[c] = true;
      continue;
    }
    // Scores are taken against the cluster as it stands on entry.
    const std::vector<Element> members(state.clustering.members(c).begin(),
                                       state.clustering.members(c).end());
    std::vector<std::uint64_t> intra(q, 0);
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) ++intra[instance.w(members[i], members[j])];
    }
    std::vector<Element> candidates(state.clustering.unclustered().begin(),
                                    state.clustering.unclustered().end());
    std::sort(candidates.begin(), candidates.end());

    std::vector<Element> include;
    std::vector<std::uint32_t> inter(q);
    for (Element v : candidates) {
      std::fill(inter.begin(), inter.end(), 0u);
      for (Element u : members) ++inter[instance.w(u, v)];
      const double score = membership_from_counts(inter, intra);
      if (band.inclusion_enabled && score >= band.include_at) {
        include.push_back(v);
      } else if (score >= band.waiting_at) {
        state.waiting[c].push_back(v);
      }
    }
    for (Element v : include) {
      join(state, c, v, instance);
      state.placed_without_query[v] = true;
    }
    for (Element v : state.waiting[c]) {
      if (state.clustering.clustered(v)) continue;
      std::vector<ClusterId> order{c};
      for (ClusterId other : state.clustering.by_size_desc()) {
        if (other != c) order.push_back(other);
      }
      state.queries.phase3 += place_by_query(state, v, order, instance, oracle);
    }
    state.done[c] = true;
  }
  state.phase = state.clustering.unclustered_count() == 0 ? McPhase::Done : McPhase::Iterate;
}

SolverOutput run_mc(const Instance& instance, const McConfig& config, std::uint64_t seed,
                    std::ostream* query_log) {
  config.consts.validate();
  const auto start = std::chrono::steady_clock::now();
  Oracle oracle(instance);
  oracle.set_log(query_log);

  McState state = phase1(instance, oracle, config, seed);
  while (state.phase != McPhase::Done) {
    phase2_loop(state, instance, oracle, config);
    if (state.phase == McPhase::Done) break;
    phase3_process(state, instance, oracle, config);
  }

  RunReport report;
  report.algo = "mc";
  report.seed = seed;
  report.queries = oracle.count();
  report.phases = state.queries;
  report.constants = EffectiveConstants{config.consts.c, config.consts.c_prime, config.consts.b(),
                                        config.consts.scale, std::string(to_string(config.band))};
  if (state.estimates.p_plus && state.estimates.p_minus) report.h_estimate = state.estimates.h;
  if (state.estimates.m_threshold) report.m_threshold = *state.estimates.m_threshold;
  for (const auto& w : state.waiting) report.waiting += w.size();
  score(report, state.clustering, instance);
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {std::move(state.clustering), std::move(report), std::move(state.vertex_queries)};
}

}  // namespace ocl
