#include "ocl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocl {

namespace {

double clamp01(double x) {
  if (std::isnan(x)) return 0.0;
  return std::clamp(x, 0.0, 1.0);
}

void require_k(std::size_t n, std::size_t k) {
  if (k < 2) throw BoundsError("bound requires k >= 2");
  if (n < k) throw BoundsError("bound requires n >= k");
}

}  // namespace

double lb_error_prob(const LowerBoundInputs& in) {
  if (in.k < 2) throw BoundsError("lb_error_prob requires k >= 2");
  if (in.a < 1) throw BoundsError("lb_error_prob requires a >= 1");
  if (in.queries < 0.0) throw BoundsError("query budget must be non-negative");
  if (!(in.h >= 0.0 && in.h <= 1.0)) throw BoundsError("h must lie in [0, 1]");
  const double a = static_cast<double>(in.a);
  const double k = static_cast<double>(in.k);
  const double per = 4.0 * in.queries / (a * k);
  const double lead = 1.0 + std::sqrt(per);
  return clamp01(1.0 - (2.0 / k) * lead * lead - per / (k - 1.0) - 2.0 * std::sqrt(a) * in.h);
}

double lb_query_budget(std::size_t n, std::size_t k, double h) {
  const double nk = static_cast<double>(n) * static_cast<double>(k);
  if (!(h > 0.0)) return nk;
  return std::min(nk, static_cast<double>(k) * static_cast<double>(k) / (h * h));
}

double fano_zero_query_kl(std::size_t n, std::size_t k, const Distribution& f_plus,
                          const Distribution& f_minus, BoundMode mode) {
  require_k(n, k);
  const double delta = symmetric_kl(f_plus, f_minus);
  if (std::isinf(delta)) return 0.0;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (mode == BoundMode::Approx) return clamp01(1.0 - nd * delta / (kd * std::log(nd)));
  const double log_hyp = std::log(nd * nd / 2.0 * (1.0 - 1.0 / kd));
  return clamp01(1.0 - ((2.0 * nd / kd) * delta + std::log(2.0)) / log_hyp);
}

double fano_zero_query_hellinger(std::size_t n, std::size_t k, const Distribution& f_plus,
                                 const Distribution& f_minus, BoundMode mode) {
  if (k < 1 || n < 1) throw BoundsError("bound requires n, k >= 1");
  const double h2 = hellinger2(f_plus, f_minus);
  const double exponent = 2.0 * static_cast<double>(n) / static_cast<double>(k);
  const double affinity =
      mode == BoundMode::Approx ? std::exp(-h2 * exponent) : std::pow(1.0 - h2, exponent);
  const double root = std::max(0.0, affinity - std::sqrt(static_cast<double>(k) / n));
  return clamp01(root * root);
}

}  // namespace ocl
