#include "ocl/divergence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace ocl {

namespace {

constexpr double kSumTolerance = 1e-12;

void require_shared(const Distribution& f, const Distribution& g) {
  if (!f.shares_support(g)) throw DivergenceError("support mismatch");
}

double parse_double(std::string_view token, std::string_view what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw DivergenceError("bad " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

Support::Support(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DivergenceError("support needs at least 2 points");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw DivergenceError("support values must be finite");
    if (i > 0 && !(values_[i - 1] < values_[i])) {
      throw DivergenceError("support values must be strictly increasing");
    }
  }
  if (values_.size() > 256) throw DivergenceError("support larger than 256 points");
}

std::size_t Support::index_of(double value) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), value);
  if (it == values_.end() || *it != value) {
    throw DivergenceError("value " + format_double(value) + " not in support");
  }
  return static_cast<std::size_t>(it - values_.begin());
}

Distribution::Distribution(SupportPtr support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (!support_) throw DivergenceError("null support");
  if (probs_.size() != support_->size()) {
    throw DivergenceError("probability vector length does not match support");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DivergenceError("probability outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw DivergenceError("probabilities sum to " + format_double(total) + ", not 1");
  }
}

Distribution Distribution::bernoulli(double p) {
  static const SupportPtr binary = std::make_shared<const Support>(std::vector<double>{0.0, 1.0});
  return Distribution(binary, {1.0 - p, p});
}

Distribution Distribution::from_counts(SupportPtr support, std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(total > 0.0)) throw DivergenceError("empty count vector");
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = counts[i] / total;
  return Distribution(std::move(support), std::move(probs));
}

Distribution Distribution::parse(std::string_view text) {
  std::vector<double> values;
  std::vector<double> probs;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw DivergenceError("expected value:prob, got '" + std::string(item) + "'");
    }
    values.push_back(parse_double(item.substr(0, colon), "support value"));
    probs.push_back(parse_double(item.substr(colon + 1), "probability"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw DivergenceError("trailing comma in distribution");
  }
  return Distribution(std::make_shared<const Support>(std::move(values)), std::move(probs));
}

std::string Distribution::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (i) out += ',';
    out += format_double((*support_)[i]);
    out += ':';
    out += format_double(probs_[i]);
  }
  return out;
}

bool Distribution::shares_support(const Distribution& other) const {
  return support_ == other.support_ || *support_ == *other.support_;
}

bool Distribution::operator==(const Distribution& other) const {
  return shares_support(other) && probs_ == other.probs_;
}

double hellinger2_probs(std::span<const double> f, std::span<const double> g) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = std::sqrt(f[i]) - std::sqrt(g[i]);
    sum += d * d;
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

double hellinger2(const Distribution& f, const Distribution& g) {
  require_shared(f, g);
  return hellinger2_probs(f.probs(), g.probs());
}

double hellinger(const Distribution& f, const Distribution& g) {
  return std::sqrt(hellinger2(f, g));
}

double kl(const Distribution& f, const Distribution& g) {
  require_shared(f, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    if (g[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += f[i] * std::log(f[i] / g[i]);
  }
  return std::max(sum, 0.0);
}

double symmetric_kl(const Distribution& f, const Distribution& g) {
  return kl(f, g) + kl(g, f);
}

}  // namespace ocl
