// Closed-form lower bounds on query complexity and error probability.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>

#include "ocl/divergence.hpp"

namespace ocl {

class BoundsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `Approx` replaces (1-x)^m by e^{-mx} and log(n^2/2 (1-1/k)) by 2 log n,
/// for comparison with the asymptotic statements.
enum class BoundMode { Exact, Approx };

struct LowerBoundInputs {
  std::size_t k = 0;
  std::size_t a = 0;  // elements per cluster; n = a * k
  double queries = 0.0;
  double h = 0.0;  // Hellinger distance H(f+ || f-)
};

/// Error probability floor for k equal clusters of size a under a budget
/// of Q adaptive queries, clamped to [0, 1]:
///   1 - (2/k)(1 + sqrt(4Q/(ak)))^2 - 4Q/(ak(k-1)) - 2 sqrt(a) h
double lb_error_prob(const LowerBoundInputs& in);

/// min(nk, k^2 / h^2), and nk when h == 0.
double lb_query_budget(std::size_t n, std::size_t k, double h);

/// Zero-query Fano bound over the n^2/2 (1-1/k) single-swap hypotheses:
///   1 - ((2n/k) Delta + ln 2) / ln K,  Delta = D(f+||f-) + D(f-||f+).
double fano_zero_query_kl(std::size_t n, std::size_t k, const Distribution& f_plus,
                          const Distribution& f_minus, BoundMode mode = BoundMode::Exact);

/// max(0, (1 - H^2)^{2n/k} - sqrt(k/n))^2.
double fano_zero_query_hellinger(std::size_t n, std::size_t k, const Distribution& f_plus,
                                 const Distribution& f_minus, BoundMode mode = BoundMode::Exact);

}  // namespace ocl
