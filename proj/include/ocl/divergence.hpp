// Finite distributions over a shared ordered support and the divergences
// between them (squared Hellinger, Hellinger, KL, symmetrised KL).
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ocl {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered set of q >= 2 strictly increasing similarity values.
class Support {
 public:
  explicit Support(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Index of `value`, or throws if it is not a support point.
  std::size_t index_of(double value) const;

  bool operator==(const Support& other) const { return values_ == other.values_; }

 private:
  std::vector<double> values_;
};

using SupportPtr = std::shared_ptr<const Support>;

/// Immutable probability mass function over a Support.
class Distribution {
 public:
  Distribution(SupportPtr support, std::vector<double> probs);

  /// Bernoulli(p) on the support {0, 1}.
  static Distribution bernoulli(double p);
  /// Normalises non-negative counts; throws if they sum to zero.
  static Distribution from_counts(SupportPtr support, std::span<const double> counts);

  /// Parses `v1:p1,v2:p2,...`.
  static Distribution parse(std::string_view text);
  /// Inverse of parse; shortest round-trip formatting of every value.
  std::string to_string() const;

  const Support& support() const { return *support_; }
  const SupportPtr& support_ptr() const { return support_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  bool shares_support(const Distribution& other) const;
  bool operator==(const Distribution& other) const;

 private:
  SupportPtr support_;
  std::vector<double> probs_;
};

/// H^2(f||g) = 1/2 * sum_i (sqrt f(i) - sqrt g(i))^2, in [0, 1].
double hellinger2(const Distribution& f, const Distribution& g);
/// sqrt(hellinger2); a metric on distributions.
double hellinger(const Distribution& f, const Distribution& g);
/// KL divergence in nats. Returns +infinity when f is not absolutely
/// continuous w.r.t. g; 0*log(0/x) is taken as 0.
double kl(const Distribution& f, const Distribution& g);
/// D(f||g) + D(g||f).
double symmetric_kl(const Distribution& f, const Distribution& g);

/// Probability-level kernels for callers that hold raw pmfs (the solvers
/// evaluate membership scores on count buffers without building
/// Distribution objects). Both spans must have equal length.
double hellinger2_probs(std::span<const double> f, std::span<const double> g);

}  // namespace ocl
