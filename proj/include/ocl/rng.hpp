// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter), so results never depend on evaluation order or
// on how work is split across threads.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace ocl {

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a tuple of 64-bit words; used to derive child
/// seeds (trial seeds, solver seeds) from a base seed.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);

/// Uniform double in [0, 1) from the counter stream (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

/// Inverse-CDF draw. `cdf` must come from make_cdf so that zero-mass
/// points are never selected.
std::size_t sample_index(std::span<const double> cdf, double u);

/// Cumulative sums of `probs`, with the tail from the last positive entry
/// pinned to exactly 1.
std::vector<double> make_cdf(std::span<const double> probs);

}  // namespace ocl
