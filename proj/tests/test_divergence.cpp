#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "ocl/divergence.hpp"
#include "oracles.hpp"

using ocl::Distribution;

TEST_CASE("hellinger2 edge cases") {
  const auto f = Distribution::bernoulli(0.3);
  CHECK(ocl::hellinger2(f, f) == 0.0);
  CHECK(ocl::hellinger2(Distribution::bernoulli(1.0), Distribution::bernoulli(0.0)) == doctest::Approx(1.0).epsilon(1e-15));

  // Reference value from the 50-digit evaluator.
  const double expected = oracle::hellinger2({0.5, 0.5}, {0.9, 0.1});
  CHECK(std::abs(ocl::hellinger2(Distribution::bernoulli(0.5), Distribution::bernoulli(0.1)) - expected) < 1e-12);
  CHECK(std::abs(expected - 0.5 * (std::pow(std::sqrt(0.5) - std::sqrt(0.1), 2) +
                                   std::pow(std::sqrt(0.5) - std::sqrt(0.9), 2))) < 1e-15);
}

TEST_CASE("support mismatch is an error") {
  const auto a = Distribution::parse("0:0.5,1:0.5");
  const auto b = Distribution::parse("0:0.5,2:0.5");
  CHECK_THROWS_WITH_AS(ocl::hellinger2(a, b), "support mismatch", ocl::DivergenceError);
  CHECK_THROWS_AS(ocl::kl(a, b), ocl::DivergenceError);
  CHECK_THROWS_AS(ocl::symmetric_kl(a, b), ocl::DivergenceError);
  // Equal support values parsed separately are the same support.
  CHECK(ocl::hellinger2(a, Distribution::parse("0:0.1,1:0.9")) > 0.0);
}

TEST_CASE("distribution validation and text format") {
  CHECK_THROWS_AS(Distribution::parse("0:0.5,1:0.4"), ocl::DivergenceError);
  CHECK_THROWS_AS(Distribution::parse("1:0.5,0:0.5"), ocl::DivergenceError);
  CHECK_THROWS_AS(Distribution::parse("0:1.5,1:-0.5"), ocl::DivergenceError);
  CHECK_THROWS_AS(Distribution::parse("0:1"), ocl::DivergenceError);
  CHECK_THROWS_AS(Distribution::parse("0:0.5,1:0.5,"), ocl::DivergenceError);
  CHECK_THROWS_AS(Distribution::parse("0=0.5,1:0.5"), ocl::DivergenceError);
  const auto d = Distribution::parse("0:0.3,1:0.7");
  CHECK(d.shares_support(Distribution::bernoulli(0.7)));
  CHECK(d[1] == 0.7);
  CHECK(d.to_string() == "0:0.3,1:0.7");

  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = oracle::random_pmf(rng, 2 + i % 7, true);
    const Distribution orig(oracle::integer_support(p.size()), p);
    CHECK(Distribution::parse(orig.to_string()) == orig);
  }
}

TEST_CASE("hellinger is the square root of hellinger2") {
  CHECK(ocl::hellinger(Distribution::bernoulli(0.2), Distribution::bernoulli(0.2)) == 0.0);
  CHECK(ocl::hellinger(Distribution::bernoulli(1.0), Distribution::bernoulli(0.0)) == doctest::Approx(1.0));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto s = oracle::integer_support(4);
    const Distribution f(s, oracle::random_pmf(rng, 4, true));
    const Distribution g(s, oracle::random_pmf(rng, 4, true));
    const double h = ocl::hellinger(f, g);
    CHECK(std::abs(h * h - ocl::hellinger2(f, g)) < 1e-12);
    CHECK(std::abs(h - std::sqrt(oracle::hellinger2(std::vector<double>(f.probs().begin(), f.probs().end()),
                                                    std::vector<double>(g.probs().begin(), g.probs().end())))) < 1e-12);
  }
}

TEST_CASE("kl edge cases") {
  const auto f = Distribution::bernoulli(0.4);
  CHECK(ocl::kl(f, f) == 0.0);
  CHECK(std::isinf(ocl::kl(Distribution::bernoulli(0.5), Distribution::bernoulli(0.0))));
  // 0 * log(0/x) = 0.
  CHECK(std::isfinite(ocl::kl(Distribution::bernoulli(0.0), Distribution::bernoulli(0.5))));
  const double expected = oracle::kl({0.5, 0.5}, {0.75, 0.25});
  CHECK(std::abs(expected - (0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0))) < 1e-15);
  CHECK(std::abs(ocl::kl(Distribution::bernoulli(0.5), Distribution::bernoulli(0.25)) - expected) < 1e-12);
}

TEST_CASE("symmetric_kl") {
  const auto f = Distribution::bernoulli(0.35);
  CHECK(ocl::symmetric_kl(f, f) == 0.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto s = oracle::integer_support(5);
    const Distribution a(s, oracle::random_pmf(rng, 5, false));
    const Distribution b(s, oracle::random_pmf(rng, 5, false));
    CHECK(ocl::symmetric_kl(a, b) == ocl::symmetric_kl(b, a));
    CHECK(ocl::symmetric_kl(a, b) >= 0.0);
  }

  // Sparse Bernoulli regime: exact value against (a'-b') (log n / n) log(a'/b').
  const double n = 1e6;
  const double r = std::log(n) / n;
  const double exact = ocl::symmetric_kl(Distribution::bernoulli(4 * r), Distribution::bernoulli(r));
  const double approx = 3.0 * r * std::log(4.0);
  CHECK(std::abs(exact - approx) / approx < 0.10);
}

TEST_CASE("divergence properties on random distributions") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t q = 2 + i % 7;
    const auto s = oracle::integer_support(q);
    const Distribution f(s, oracle::random_pmf(rng, q, true));
    const Distribution g(s, oracle::random_pmf(rng, q, true));
    const Distribution h(s, oracle::random_pmf(rng, q, true));

    const double fg = ocl::hellinger2(f, g);
    CHECK(fg >= 0.0);
    CHECK(fg <= 1.0);
    CHECK(fg == ocl::hellinger2(g, f));
    CHECK(ocl::hellinger2(f, f) == 0.0);
    CHECK(ocl::hellinger(f, h) <= ocl::hellinger(f, g) + ocl::hellinger(g, h) + 1e-9);
    const double d = ocl::kl(f, g);
    if (std::isfinite(d)) CHECK(d >= 2.0 * fg - 1e-12);
  }
}

TEST_CASE("hellinger affinity tensorises over independent products") {
  std::mt19937_64 rng(99);
  auto product = [](const Distribution& a, const Distribution& b) {
    std::vector<double> p;
    for (double x : a.probs()) {
      for (double y : b.probs()) p.push_back(x * y);
    }
    // Renormalise away rounding so the product passes the sum check.
    double t = 0;
    for (double x : p) t += x;
    for (double& x : p) x /= t;
    return Distribution(oracle::integer_support(p.size()), p);
  };
  for (int i = 0; i < 200; ++i) {
    const std::size_t q1 = 2 + i % 3;
    const std::size_t q2 = 2 + i % 4;
    const auto s1 = oracle::integer_support(q1);
    const auto s2 = oracle::integer_support(q2);
    const Distribution p1(s1, oracle::random_pmf(rng, q1, false));
    const Distribution r1(s1, oracle::random_pmf(rng, q1, false));
    const Distribution p2(s2, oracle::random_pmf(rng, q2, false));
    const Distribution r2(s2, oracle::random_pmf(rng, q2, false));
    const double lhs = 1.0 - ocl::hellinger2(product(p1, p2), product(r1, r2));
    const double rhs = (1.0 - ocl::hellinger2(p1, r1)) * (1.0 - ocl::hellinger2(p2, r2));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}
