// Same-cluster oracle. The only place solvers obtain ground-truth answers;
// charges one unit per distinct unordered pair.
#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include "ocl/instance.hpp"

namespace ocl {

class OracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Answer : int { Different = -1, Same = +1 };

class Oracle {
 public:
  explicit Oracle(std::span<const std::uint32_t> truth) : truth_(truth) {}
  explicit Oracle(const Instance& instance) : Oracle(std::span<const std::uint32_t>(instance.truth)) {}

  /// +1 iff u and v share a ground-truth cluster. Repeated pairs (in either
  /// order) return the memoised answer and are not charged again.
  Answer query(Element u, Element v);
  bool same(Element u, Element v) { return query(u, v) == Answer::Same; }

  /// Number of distinct pairs answered so far.
  std::uint64_t count() const { return answered_.size(); }

  /// Every charged query is appended to `log` as `step,u,v,answer`.
  void set_log(std::ostream* log);

 private:
  std::span<const std::uint32_t> truth_;
  std::unordered_map<std::uint64_t, Answer> answered_;
  std::ostream* log_ = nullptr;
};

}  // namespace ocl
