// Hand-built instances for tests.
#pragma once

#include <functional>
#include <vector>

#include "ocl/instance.hpp"

namespace fixture {

/// Instance with the given labels whose side information is w(u, v) for
/// u < v (support {0, 1}).
inline ocl::Instance binary_instance(std::vector<std::uint32_t> truth,
                                     const std::function<std::uint8_t(ocl::Element, ocl::Element)>& w) {
  const std::size_t n = truth.size();
  std::uint32_t k = 0;
  for (auto t : truth) k = std::max(k, t + 1);
  ocl::SideInfo side(n);
  for (ocl::Element u = 0; u < n; ++u) {
    for (ocl::Element v = u + 1; v < n; ++v) side.at(u, v) = w(u, v);
  }
  return ocl::Instance{n, k, std::move(truth), std::move(side), ocl::Distribution::bernoulli(0.5),
                       ocl::Distribution::bernoulli(0.5), 0};
}

}  // namespace fixture
