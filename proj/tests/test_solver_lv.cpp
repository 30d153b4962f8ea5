#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ocl/solver_lv.hpp"

using namespace ocl;

namespace {

std::uint64_t median(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
}

}  // namespace

TEST_CASE("las vegas and baseline are always exact and within the query cap") {
  const std::vector<std::pair<Distribution, Distribution>> pairs{
      {Distribution::bernoulli(0.8), Distribution::bernoulli(0.2)},
      {Distribution::parse("0:0.1,1:0.2,2:0.7"), Distribution::parse("0:0.5,1:0.4,2:0.1")},
      {Distribution::bernoulli(0.5), Distribution::bernoulli(0.5)}};
  for (const auto& [fp, fm] : pairs) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      for (std::uint32_t k : {2u, 5u}) {
        const std::size_t n = 150;
        const Instance inst = generate(n, Skewed{k, 4.0}, fp, fm, seed);
        for (const auto& out : {run_lv(inst, seed), run_baseline(inst, seed)}) {
          CHECK(out.report.exact);
          CHECK(out.report.misassigned == 0);
          CHECK(out.report.queries <= n * k);
          for (auto q : out.vertex_queries) CHECK(q <= k);
          CHECK(out.clustering.num_clusters() == k);
        }
      }
    }
  }
}

TEST_CASE("baseline examples") {
  const auto f = Distribution::bernoulli(0.7);
  CHECK(run_baseline(generate(1, Balanced{1}, f, f, 1), 1).report.queries == 0);
  CHECK(run_lv(generate(1, Balanced{1}, f, f, 1), 1).report.queries == 0);
  for (std::size_t n : {2u, 17u, 300u}) {
    CHECK(run_baseline(generate(n, Balanced{1}, f, f, 5), 5).report.queries == n - 1);
    CHECK(run_lv(generate(n, Balanced{1}, f, f, 5), 5).report.queries == n - 1);
  }
  // Singletons: the i-th element asks i - 1 queries.
  const Instance all_apart = generate(20, Balanced{20}, f, f, 2);
  CHECK(run_baseline(all_apart, 2).report.queries == 20 * 19 / 2);
}

TEST_CASE("side information cuts las vegas queries in half") {
  const auto fp = Distribution::bernoulli(0.9);
  const auto fm = Distribution::bernoulli(0.1);
  std::vector<std::uint64_t> lv, base;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = generate(2000, Balanced{10}, fp, fm, seed);
    lv.push_back(run_lv(inst, seed).report.queries);
    base.push_back(run_baseline(inst, seed).report.queries);
  }
  CHECK(2 * median(lv) <= median(base));
}

TEST_CASE("dyadic size groups") {
  CHECK(size_group(100, 100) == 1);
  CHECK(size_group(51, 100) == 1);
  CHECK(size_group(50, 100) == 2);
  CHECK(size_group(26, 100) == 2);
  CHECK(size_group(25, 100) == 3);
  CHECK(size_group(1, 100) == 7);  // 100/128 < 1 <= 100/64
  CHECK(size_group(1, 1) == 1);
  for (std::size_t largest = 1; largest <= 200; ++largest) {
    for (std::size_t s = 1; s <= largest; ++s) {
      const std::size_t g = size_group(s, largest);
      // s in (largest / 2^g, largest / 2^(g-1)]
      CHECK(static_cast<double>(s) > largest / std::ldexp(1.0, static_cast<int>(g)));
      CHECK(static_cast<double>(s) <= largest / std::ldexp(1.0, static_cast<int>(g) - 1));
    }
  }
}

TEST_CASE("query log records the run") {
  const Instance inst = generate(120, Balanced{4}, Distribution::bernoulli(0.8),
                                 Distribution::bernoulli(0.2), 6);
  std::ostringstream log;
  const auto out = run_lv(inst, 6, &log);
  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,u,v,answer");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == out.report.queries);
}

TEST_CASE("large recovered clusters are found within a logarithmic number of queries") {
  // Replays the query log: rows are grouped by the element being placed, so
  // the recovered size of its true cluster at that moment is the number of
  // earlier placements with the same label.
  const auto fp = Distribution::bernoulli(0.999);
  const auto fm = Distribution::bernoulli(0.001);
  const std::size_t n = 9600;
  const std::uint32_t k = 12;
  const auto big = 2 * static_cast<std::size_t>(std::ceil(32.0 * std::log(double(n)) / hellinger2(fp, fm)));
  const auto budget = 1 + static_cast<std::uint32_t>(std::ceil(std::log(double(n))));
  const Instance inst = generate(n, Balanced{k}, fp, fm, 11);
  std::ostringstream log;
  const auto out = run_lv(inst, 11, &log);
  REQUIRE(out.report.exact);

  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);
  std::vector<Element> placed;
  while (std::getline(in, line)) {
    const Element u = static_cast<Element>(std::stoul(line.substr(line.find(',') + 1)));
    if (placed.empty() || placed.back() != u) placed.push_back(u);
  }
  std::vector<std::size_t> recovered(k, 0);
  // The first element asks nothing and is absent from the log.
  for (Element v = 0; v < n; ++v) {
    if (out.vertex_queries[v] == 0) ++recovered[inst.truth[v]];
  }
  std::size_t eligible = 0, slow = 0;
  for (Element v : placed) {
    if (recovered[inst.truth[v]] > big) {
      ++eligible;
      slow += out.vertex_queries[v] > budget;
    }
    ++recovered[inst.truth[v]];
  }
  REQUIRE(eligible >= 1000);
  CHECK(static_cast<double>(slow) <= 0.01 * static_cast<double>(eligible));
}
