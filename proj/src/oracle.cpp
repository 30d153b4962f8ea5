#include "ocl/oracle.hpp"

#include <string>

namespace ocl {

Answer Oracle::query(Element u, Element v) {
  if (u == v) throw OracleError("self query");
  if (u >= truth_.size() || v >= truth_.size()) {
    throw OracleError("element id out of range: " + std::to_string(u >= truth_.size() ? u : v));
  }
  const std::uint64_t lo = std::min(u, v);
  const std::uint64_t hi = std::max(u, v);
  const std::uint64_t key = (lo << 32) | hi;
  auto [it, inserted] = answered_.try_emplace(key, Answer::Different);
  if (inserted) {
    it->second = truth_[u] == truth_[v] ? Answer::Same : Answer::Different;
    if (log_) {
      *log_ << answered_.size() << ',' << u << ',' << v << ',' << static_cast<int>(it->second)
            << '\n';
    }
  }
  return it->second;
}

void Oracle::set_log(std::ostream* log) {
  log_ = log;
  if (log_) *log_ << "step,u,v,answer\n";
}

}  // namespace ocl
