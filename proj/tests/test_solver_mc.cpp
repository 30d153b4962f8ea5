#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ocl/solver_mc.hpp"

using namespace ocl;

namespace {

const Distribution kP9 = Distribution::bernoulli(0.9);
const Distribution kP1 = Distribution::bernoulli(0.1);

McConfig desk(double scale) {
  McConfig c;
  c.consts.scale = scale;
  return c;
}

// Every output cluster is label-pure.
void check_safety(const SolverOutput& out, const Instance& inst) {
  const auto& cl = out.clustering;
  for (ClusterId c = 0; c < cl.num_clusters(); ++c) {
    std::set<std::uint32_t> labels;
    for (Element v : cl.members(c)) {
      labels.insert(inst.truth[v]);
    }
    CHECK(labels.size() <= 1);
  }
}

}  // namespace

TEST_CASE("phase 1 stops exactly at the target size") {
  const double scale = 29.99 / (118.0 * std::log(1000.0));
  const McConfig config = desk(scale);
  REQUIRE(initial_target(config.consts, 1000) == 30);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = generate(1000, Balanced{4}, kP9, kP1, seed);
    Oracle oracle(inst);
    const McState st = phase1(inst, oracle, config, seed);
    CHECK(st.clustering.max_cluster_size() == 30);
    CHECK(oracle.count() <= 4 * st.phase1_processed);
    CHECK(st.queries.phase1 == oracle.count());
    CHECK(st.phase == McPhase::Iterate);
  }
}

TEST_CASE("phase 1 with a single cluster asks one query per element") {
  const McConfig config = desk(0.01);
  const Instance inst = generate(400, Balanced{1}, kP9, kP1, 3);
  Oracle oracle(inst);
  const McState st = phase1(inst, oracle, config, 3);
  CHECK(oracle.count() == st.phase1_processed - 1);
  CHECK(st.clustering.max_cluster_size() == st.phase1_processed);
}

TEST_CASE("exhaustion path is exact") {
  // Default constants: ceil(118 ln 60) > 60, so Phase 1 clusters everything.
  const Instance inst = generate(60, Balanced{3}, kP9, kP1, 9);
  const auto out = run_mc(inst, McConfig{}, 9);
  CHECK(out.report.exact);
  CHECK(out.report.queries <= 60 * 3);
  CHECK(out.report.phases.phase2 == 0);
  CHECK(out.report.phases.phase3 == 0);
}

TEST_CASE("phase 2 exits at once when the threshold is already met") {
  const Instance inst = generate(1000, Balanced{4}, kP9, kP1, 5);
  McConfig config = desk(0.01);
  Oracle oracle(inst);
  McState st = phase1(inst, oracle, config, 5);
  st.estimates = st.tally.estimates(inst, config.consts);
  // Lower the size requirement below the current largest cluster.
  config.consts.scale = 1e-6;
  const auto before = oracle.count();
  phase2_loop(st, inst, oracle, config);
  CHECK(oracle.count() == before);
  CHECK(st.phase == McPhase::Grow);
}

TEST_CASE("phase 2 keeps querying while only one cluster exists") {
  // k=1: p_minus is never available, so the threshold stays unbounded and
  // every element is placed by querying.
  const Instance inst = generate(300, Balanced{1}, kP9, kP1, 1);
  const auto out = run_mc(inst, desk(0.01), 1);
  CHECK(out.report.exact);
  CHECK(out.report.queries == 299);
  CHECK(!out.report.m_threshold.has_value());
}

TEST_CASE("phase 2 exit size relative to the threshold") {
  const std::size_t n = 2000;
  const double scale = 60.0 * hellinger2(kP9, kP1) / (118.0 * std::log(double(n)));
  const McConfig config = desk(scale);
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = generate(n, Balanced{5}, kP9, kP1, seed);
    Oracle oracle(inst);
    McState st = phase1(inst, oracle, config, seed);
    phase2_loop(st, inst, oracle, config);
    REQUIRE(st.estimates.m_threshold);
    const std::size_t m = *st.estimates.m_threshold;
    const bool ok = st.clustering.max_cluster_size() >= m &&
                    n - st.clustering.unclustered_count() <= 3 * 5 * m;
    good += ok;
  }
  CHECK(good >= 48);  // 95% of 50
}

TEST_CASE("phase 3 band arithmetic") {
  const McConfig lemma = desk(1.0);
  const std::size_t n = 1000;
  const double h = 0.6;
  const auto band = phase3_band(h, lemma, n);
  const double b = std::sqrt(118.0 / 3.0);
  const double centre = h / b;
  const double half = 2 * h * h / (b * std::sqrt(std::log(1000.0)));
  CHECK(band.include_at == doctest::Approx(-(centre - half)));
  CHECK(band.waiting_at == doctest::Approx(-(centre + half)));
  CHECK(band.inclusion_enabled);
  // A perfect score is always above the inclusion edge when h > 0.
  CHECK(0.0 >= band.include_at);
  // -1 lies below the waiting edge whenever h <= B/2.
  for (double hh : {0.1, 0.5, 1.0}) CHECK(-1.0 < phase3_band(hh, lemma, n).waiting_at);

  McConfig text = lemma;
  text.band = BandForm::Text;
  const auto tb = phase3_band(h, text, n);
  CHECK(tb.include_at == doctest::Approx(-(4 * h / 118.0 - 2 * h * h / (118.0 * std::sqrt(std::log(1000.0))))));

  // Tiny n pushes the inner edge to zero or below: inclusion is disabled.
  CHECK(!phase3_band(1.0, lemma, 2).inclusion_enabled);
  CHECK(!phase3_band(0.0, lemma, 1000).inclusion_enabled);

  CHECK(parse_band("lemma") == BandForm::Lemma);
  CHECK(parse_band("text") == BandForm::Text);
  CHECK_THROWS(parse_band("wide"));
}

TEST_CASE("phase 3 recovers planted clusters") {
  const auto fp = Distribution::bernoulli(0.85);
  const auto fm = Distribution::bernoulli(0.15);
  int exact = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = generate(1000, Balanced{4}, fp, fm, seed);
    exact += run_mc(inst, desk(0.01), seed).report.exact;
  }
  CHECK(exact >= 45);
}

TEST_CASE("useless side information still yields an exact clustering") {
  const auto same = Distribution::bernoulli(0.5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = generate(400, Balanced{4}, same, same, seed);
    const auto out = run_mc(inst, desk(0.01), seed);
    CHECK(out.report.exact);
    CHECK(out.report.queries <= 400 * 4);
  }
}

TEST_CASE("single element") {
  const Instance inst = generate(1, Balanced{1}, kP9, kP1, 1);
  const auto out = run_mc(inst, McConfig{}, 1);
  CHECK(out.report.queries == 0);
  CHECK(out.report.exact);
  CHECK(out.clustering.num_clusters() == 1);
}

TEST_CASE("query growth is logarithmic in n") {
  const McConfig config = desk(0.01);
  auto median_queries = [&](std::size_t n) {
    std::vector<std::uint64_t> q;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      q.push_back(run_mc(generate(n, Balanced{5}, kP9, kP1, seed), config, seed).report.queries);
    }
    std::sort(q.begin(), q.end());
    return (q[14] + q[15]) / 2.0;
  };
  CHECK(median_queries(2000) <= 2.0 * median_queries(500));
}

TEST_CASE("safety invariants and query cap") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 300;
    const std::uint32_t k = 3;
    const Instance inst = generate(n, Balanced{k}, kP9, kP1, seed);
    const auto out = run_mc(inst, desk(0.01), seed);
    CHECK(out.report.queries <= n * k + k * out.report.waiting);
    CHECK(out.report.queries ==
          out.report.phases.phase1 + out.report.phases.phase2 + out.report.phases.phase3);

    check_safety(out, inst);

    // No cross-cluster pair answers +1 (full sweep, not charged to the run).
    const auto& cl = out.clustering;
    bool clean = true;
    for (Element u = 0; u < n && clean; ++u) {
      for (Element v = u + 1; v < n; ++v) {
        if (cl.cluster_of(u) != cl.cluster_of(v) && inst.truth[u] == inst.truth[v]) {
          clean = false;
          break;
        }
      }
    }
    CHECK(clean);
    CHECK(out.vertex_queries.size() == n);
    std::uint64_t total = 0;
    for (auto q : out.vertex_queries) total += q;
    CHECK(total == out.report.queries);
  }
}

TEST_CASE("report carries the effective constants") {
  const Instance inst = generate(500, Balanced{5}, kP9, kP1, 2);
  McConfig config = desk(0.01);
  config.band = BandForm::Text;
  const auto out = run_mc(inst, config, 2);
  REQUIRE(out.report.constants);
  CHECK(out.report.constants->c == 118);
  CHECK(out.report.constants->c_prime == 3);
  CHECK(out.report.constants->scale == 0.01);
  CHECK(out.report.constants->band == "text");
  CHECK(out.report.algo == "mc");
  CHECK_THROWS_AS(run_mc(inst, McConfig{{100, 3, 1}, BandForm::Lemma}, 1), EstimationError);
}

TEST_CASE("runs are reproducible from the seed") {
  const Instance inst = generate(800, Balanced{4}, kP9, kP1, 4);
  auto a = run_mc(inst, desk(0.01), 77).report;
  auto b = run_mc(inst, desk(0.01), 77).report;
  a.wall_ms = b.wall_ms = 0;
  CHECK(a == b);
}
