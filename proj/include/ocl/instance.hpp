// Planted-clustering instances: a ground-truth partition of [n] plus the
// side-information matrix W, stored as a packed upper triangle of support
// indices.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ocl/divergence.hpp"

namespace ocl {

using Element = std::uint32_t;

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance file. `offset()` is the byte position where parsing
/// stopped.
class ParseError : public InstanceError {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Balanced {
  std::size_t k;
};
struct ExplicitSizes {
  std::vector<std::size_t> sizes;
};
/// k clusters whose sizes fall geometrically so that largest/smallest is
/// roughly `ratio`.
struct Skewed {
  std::size_t k;
  double ratio;
};
using ClusterSpec = std::variant<Balanced, ExplicitSizes, Skewed>;

/// Resolves a spec into concrete cluster sizes summing to n.
std::vector<std::size_t> cluster_sizes(std::size_t n, const ClusterSpec& spec);
std::string describe(const ClusterSpec& spec);

/// Upper-triangular matrix of support indices, one byte per unordered pair.
class SideInfo {
 public:
  SideInfo() = default;
  explicit SideInfo(std::size_t n) : n_(n), data_(pair_count(n), 0) {}
  SideInfo(std::size_t n, std::vector<std::uint8_t> data);

  static constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

  /// Linear index of the unordered pair {u, v}, u != v.
  std::size_t pair_index(Element u, Element v) const {
    if (u > v) std::swap(u, v);
    return static_cast<std::size_t>(u) * (2 * n_ - u - 1) / 2 + (v - u - 1);
  }
  std::uint8_t at(Element u, Element v) const { return data_[pair_index(u, v)]; }
  std::uint8_t& at(Element u, Element v) { return data_[pair_index(u, v)]; }

  std::size_t n() const { return n_; }
  std::span<const std::uint8_t> raw() const { return data_; }
  std::span<std::uint8_t> raw() { return data_; }

  bool operator==(const SideInfo&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Instance {
  std::size_t n = 0;
  std::size_t k = 0;
  /// truth[v] is the cluster label of v, in [0, k).
  std::vector<std::uint32_t> truth;
  SideInfo side_info;
  Distribution f_plus;
  Distribution f_minus;
  std::uint64_t seed = 0;

  std::size_t q() const { return f_plus.size(); }
  const Support& support() const { return f_plus.support(); }
  std::uint8_t w(Element u, Element v) const { return side_info.at(u, v); }

  /// Ground-truth blocks, each sorted ascending, ordered by label.
  std::vector<std::vector<Element>> blocks() const;
  /// Throws InstanceError if any structural invariant fails.
  void validate() const;
  /// Stable 64-bit FNV-1a digest of truth, side info, seed and
  /// distributions, rendered as 16 hex digits.
  std::string fingerprint() const;

  bool operator==(const Instance& other) const;
};

/// Samples an instance. Intra-cluster entries are drawn from f_plus and
/// inter-cluster entries from f_minus, each from its own counter stream
/// keyed by (seed, pair index). Output is identical for any `threads`.
Instance generate(std::size_t n, const ClusterSpec& spec, const Distribution& f_plus,
                  const Distribution& f_minus, std::uint64_t seed, unsigned threads = 1);

/// Binary container: text header beginning with the magic `OCLB1`,
/// followed by little-endian u32 labels and the packed triangle.
void save(const Instance& instance, const std::filesystem::path& path);
Instance load(const std::filesystem::path& path);
std::string serialize(const Instance& instance);
Instance deserialize(std::string_view bytes);

/// Human-readable JSON variant; only written for n <= 200.
inline constexpr std::size_t kJsonSidecarMaxN = 200;
void save_json(const Instance& instance, const std::filesystem::path& path);
Instance load_json(const std::filesystem::path& path);

}  // namespace ocl
