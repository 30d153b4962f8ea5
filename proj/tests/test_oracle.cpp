#include <random>
#include <sstream>

#include "doctest.h"
#include "ocl/oracle.hpp"
#include "ocl/solver_lv.hpp"

using namespace ocl;

TEST_CASE("answers and memoisation") {
  const std::vector<std::uint32_t> truth{0, 0, 1, 1, 2};
  Oracle o(truth);
  CHECK(o.count() == 0);
  CHECK(o.query(0, 1) == Answer::Same);
  CHECK(o.query(1, 0) == Answer::Same);
  CHECK(o.count() == 1);
  CHECK(o.query(0, 2) == Answer::Different);
  CHECK(o.query(3, 4) == Answer::Different);
  CHECK(o.query(2, 0) == Answer::Different);
  CHECK(o.count() == 3);
}

TEST_CASE("invalid queries") {
  const std::vector<std::uint32_t> truth{0, 1, 0};
  Oracle o(truth);
  CHECK_THROWS_WITH_AS(o.query(1, 1), "self query", OracleError);
  CHECK_THROWS_AS(o.query(0, 3), OracleError);
  CHECK(o.count() == 0);
}

TEST_CASE("answers are consistent with the partition on every triple") {
  std::mt19937_64 rng(17);
  std::vector<std::uint32_t> truth(50);
  for (auto& t : truth) t = static_cast<std::uint32_t>(rng() % 6);
  Oracle o(truth);
  std::uint64_t last = 0;
  for (Element u = 0; u < 50; ++u) {
    for (Element v = 0; v < 50; ++v) {
      if (u == v) continue;
      CHECK(o.same(u, v) == o.same(v, u));
      CHECK(o.count() >= last);
      last = o.count();
    }
  }
  CHECK(o.count() == 50 * 49 / 2);
  for (Element u = 0; u < 50; ++u) {
    for (Element v = 0; v < 50; ++v) {
      for (Element w = 0; w < 50; ++w) {
        if (u == v || v == w || u == w) continue;
        if (o.same(u, v) && o.same(v, w)) CHECK(o.same(u, w));
        if (o.same(u, v) && !o.same(v, w)) CHECK(!o.same(u, w));
      }
    }
  }
  CHECK(o.count() == 50 * 49 / 2);
}

TEST_CASE("query log records charged queries only") {
  const std::vector<std::uint32_t> truth{0, 0, 1};
  std::ostringstream log;
  Oracle o(truth);
  o.set_log(&log);
  o.query(0, 1);
  o.query(1, 0);
  o.query(2, 1);
  CHECK(log.str() == "step,u,v,answer\n1,0,1,1\n2,2,1,-1\n");
}

TEST_CASE("baseline with a single cluster charges n - 1 queries") {
  const Instance inst = generate(100, Balanced{1}, Distribution::bernoulli(0.6),
                                 Distribution::bernoulli(0.4), 3);
  CHECK(run_baseline(inst, 5).report.queries == 99);
}
