#include "ocl/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ocl/rng.hpp"

namespace ocl {

namespace {

constexpr std::string_view kMagic = "OCLB1";
constexpr std::uint64_t kTruthStream = 0x7472757468ULL;  // "truth"

std::string hex64(std::uint64_t x) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) out[static_cast<std::size_t>(i)] = digits[x & 0xf];
  return out;
}

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  }
  void str(std::string_view s) { bytes(s.data(), s.size()); }
  void u64(std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    bytes(b, 8);
  }
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InstanceError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InstanceError("write failed for " + path.string());
}

// Labels keep their spec block index; only positions are shuffled.
std::vector<std::uint32_t> shuffled_labels(const std::vector<std::size_t>& sizes,
                                           std::uint64_t seed) {
  std::vector<std::uint32_t> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels.insert(labels.end(), sizes[c], static_cast<std::uint32_t>(c));
  }
  std::mt19937_64 rng(hash_words({seed, kTruthStream}));
  // Fisher-Yates with an explicit bound computation so the permutation does
  // not depend on the standard library's shuffle implementation.
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(labels[i - 1], labels[j]);
  }
  return labels;
}

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  std::string_view line() {
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ParseError("unterminated header line", pos_);
    std::string_view out = bytes_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return out;
  }

  std::string_view field(std::string_view key) {
    const std::size_t start = pos_;
    std::string_view l = line();
    if (l.size() <= key.size() || l.substr(0, key.size()) != key || l[key.size()] != ' ') {
      throw ParseError("expected header field '" + std::string(key) + "'", start);
    }
    return l.substr(key.size() + 1);
  }

  std::uint64_t integer(std::string_view key) {
    const std::size_t start = pos_;
    std::string_view v = field(key);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ParseError("bad integer for '" + std::string(key) + "'", start + key.size() + 1);
    }
    return out;
  }

  Distribution distribution(std::string_view key) {
    const std::size_t start = pos_;
    std::string_view v = field(key);
    try {
      return Distribution::parse(v);
    } catch (const DivergenceError& e) {
      throw ParseError(std::string(key) + ": " + e.what(), start + key.size() + 1);
    }
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset)
    : InstanceError(what + " at byte " + std::to_string(offset)), offset_(offset) {}

std::vector<std::size_t> cluster_sizes(std::size_t n, const ClusterSpec& spec) {
  std::vector<std::size_t> sizes;
  if (const auto* b = std::get_if<Balanced>(&spec)) {
    if (b->k == 0) throw InstanceError("k must be at least 1");
    if (b->k > n) throw InstanceError("Balanced(k) with k > n would leave an empty cluster");
    sizes.assign(b->k, n / b->k);
    for (std::size_t i = 0; i < n % b->k; ++i) ++sizes[i];
  } else if (const auto* e = std::get_if<ExplicitSizes>(&spec)) {
    if (e->sizes.empty()) throw InstanceError("k must be at least 1");
    sizes = e->sizes;
    if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) {
      throw InstanceError("empty cluster requested");
    }
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    if (total != n) {
      throw InstanceError("cluster sizes sum to " + std::to_string(total) + ", expected " +
                          std::to_string(n));
    }
  } else {
    const auto& s = std::get<Skewed>(spec);
    if (s.k == 0) throw InstanceError("k must be at least 1");
    if (s.k > n) throw InstanceError("Skewed(k) with k > n would leave an empty cluster");
    if (!(s.ratio >= 1.0)) throw InstanceError("skew ratio must be >= 1");
    // Geometric weights, one guaranteed element per cluster, remainder by
    // largest fractional part.
    std::vector<double> weights(s.k);
    for (std::size_t i = 0; i < s.k; ++i) {
      weights[i] = s.k == 1 ? 1.0 : std::pow(s.ratio, -static_cast<double>(i) / (s.k - 1));
    }
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    const std::size_t spare = n - s.k;
    sizes.assign(s.k, 1);
    std::vector<std::pair<double, std::size_t>> frac;
    std::size_t used = 0;
    for (std::size_t i = 0; i < s.k; ++i) {
      const double share = spare * weights[i] / wsum;
      const auto whole = static_cast<std::size_t>(std::floor(share));
      sizes[i] += whole;
      used += whole;
      frac.emplace_back(share - whole, i);
    }
    std::stable_sort(frac.begin(), frac.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < spare; ++i, ++used) ++sizes[frac[i].second];
  }
  return sizes;
}

std::string describe(const ClusterSpec& spec) {
  if (const auto* b = std::get_if<Balanced>(&spec)) return "balanced(" + std::to_string(b->k) + ")";
  if (const auto* e = std::get_if<ExplicitSizes>(&spec)) {
    std::string out = "sizes(";
    for (std::size_t i = 0; i < e->sizes.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(e->sizes[i]);
    }
    return out + ")";
  }
  const auto& s = std::get<Skewed>(spec);
  std::ostringstream os;
  os << "skewed(" << s.k << ' ' << s.ratio << ')';
  return os.str();
}

SideInfo::SideInfo(std::size_t n, std::vector<std::uint8_t> data) : n_(n), data_(std::move(data)) {
  if (data_.size() != pair_count(n)) throw InstanceError("side info has wrong number of entries");
}

std::vector<std::vector<Element>> Instance::blocks() const {
  std::vector<std::vector<Element>> out(k);
  for (Element v = 0; v < n; ++v) out[truth[v]].push_back(v);
  return out;
}

void Instance::validate() const {
  if (truth.size() != n) throw InstanceError("truth has " + std::to_string(truth.size()) +
                                             " labels for n = " + std::to_string(n));
  if (n > 0 && k == 0) throw InstanceError("k = 0 for a nonempty instance");
  std::vector<std::size_t> counts(k, 0);
  for (std::uint32_t label : truth) {
    if (label >= k) throw InstanceError("truth label out of range");
    ++counts[label];
  }
  if (std::find(counts.begin(), counts.end(), 0u) != counts.end()) {
    throw InstanceError("truth has an empty cluster");
  }
  if (side_info.n() != n || side_info.raw().size() != SideInfo::pair_count(n)) {
    throw InstanceError("side info does not hold n(n-1)/2 entries");
  }
  if (!f_plus.shares_support(f_minus)) throw InstanceError("f_plus and f_minus support mismatch");
  const std::size_t q = f_plus.size();
  for (std::uint8_t idx : side_info.raw()) {
    if (idx >= q) throw InstanceError("side info entry outside the support");
  }
}

std::string Instance::fingerprint() const {
  Fnv1a h;
  h.u64(n);
  h.u64(k);
  h.u64(seed);
  h.str(f_plus.to_string());
  h.str("|");
  h.str(f_minus.to_string());
  h.bytes(truth.data(), truth.size() * sizeof(std::uint32_t));
  h.bytes(side_info.raw().data(), side_info.raw().size());
  return hex64(h.h);
}

bool Instance::operator==(const Instance& other) const {
  return n == other.n && k == other.k && truth == other.truth && side_info == other.side_info &&
         f_plus == other.f_plus && f_minus == other.f_minus && seed == other.seed;
}

Instance generate(std::size_t n, const ClusterSpec& spec, const Distribution& f_plus,
                  const Distribution& f_minus, std::uint64_t seed, unsigned threads) {
  if (!f_plus.shares_support(f_minus)) throw InstanceError("f_plus and f_minus support mismatch");
  const std::vector<std::size_t> sizes = cluster_sizes(n, spec);

  Instance inst{n, sizes.size(), shuffled_labels(sizes, seed), SideInfo(n), f_plus, f_minus, seed};

  const std::vector<double> cdf_plus = make_cdf(f_plus.probs());
  const std::vector<double> cdf_minus = make_cdf(f_minus.probs());
  const std::uint64_t stream_seed = hash_words({seed, 0x77ULL});

  auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
    auto data = inst.side_info.raw();
    for (std::size_t u = row_begin; u < row_end; ++u) {
      std::size_t idx = inst.side_info.pair_index(static_cast<Element>(u), static_cast<Element>(u + 1));
      for (std::size_t v = u + 1; v < n; ++v, ++idx) {
        const auto& cdf = inst.truth[u] == inst.truth[v] ? cdf_plus : cdf_minus;
        data[idx] = static_cast<std::uint8_t>(sample_index(cdf, counter_uniform(stream_seed, idx)));
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || n < 256) {
    fill_rows(0, n);
  } else {
    // Rows are interleaved in chunks so that the triangular workload is
    // spread roughly evenly.
    std::vector<std::jthread> pool;
    constexpr std::size_t chunk = 32;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t start = t * chunk; start < n; start += threads * chunk) {
          fill_rows(start, std::min(n, start + chunk));
        }
      });
    }
  }
  return inst;
}

std::string serialize(const Instance& instance) {
  std::string out;
  out += kMagic;
  out += '\n';
  out += "n " + std::to_string(instance.n) + '\n';
  out += "k " + std::to_string(instance.k) + '\n';
  out += "q " + std::to_string(instance.q()) + '\n';
  out += "seed " + std::to_string(instance.seed) + '\n';
  out += "fplus " + instance.f_plus.to_string() + '\n';
  out += "fminus " + instance.f_minus.to_string() + '\n';
  out += "data\n";
  out.reserve(out.size() + 4 * instance.n + instance.side_info.raw().size());
  for (std::uint32_t label : instance.truth) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((label >> (8 * i)) & 0xff);
  }
  const auto raw = instance.side_info.raw();
  out.append(reinterpret_cast<const char*>(raw.data()), raw.size());
  return out;
}

Instance deserialize(std::string_view bytes) {
  HeaderReader r(bytes);
  {
    const std::size_t start = r.offset();
    if (r.line() != kMagic) throw ParseError("missing OCLB1 magic", start);
  }
  const std::uint64_t n = r.integer("n");
  const std::uint64_t k = r.integer("k");
  const std::size_t q_offset = r.offset();
  const std::uint64_t q = r.integer("q");
  const std::uint64_t seed = r.integer("seed");
  Distribution f_plus = r.distribution("fplus");
  const std::size_t fminus_offset = r.offset();
  Distribution f_minus = r.distribution("fminus");
  {
    const std::size_t start = r.offset();
    if (r.line() != "data") throw ParseError("expected 'data' marker", start);
  }
  if (f_plus.size() != q) throw ParseError("q does not match distribution support", q_offset);
  if (!f_plus.shares_support(f_minus)) throw ParseError("fplus/fminus support mismatch", fminus_offset);

  std::size_t pos = r.offset();
  if (n > (std::size_t{1} << 24)) throw ParseError("n too large", pos);
  const std::size_t pairs = SideInfo::pair_count(n);
  const std::size_t need = 4 * n + pairs;
  if (bytes.size() - pos < need) {
    throw ParseError("truncated body: need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() - pos),
                     bytes.size());
  }
  if (bytes.size() - pos > need) throw ParseError("trailing bytes after body", pos + need);

  std::vector<std::uint32_t> truth(n);
  for (std::size_t v = 0; v < n; ++v, pos += 4) {
    std::uint32_t label = 0;
    for (int i = 0; i < 4; ++i) {
      label |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    if (label >= k) throw ParseError("truth label out of range", pos);
    truth[v] = label;
  }
  std::vector<std::uint8_t> data(pairs);
  std::memcpy(data.data(), bytes.data() + pos, pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    if (data[i] >= q) throw ParseError("side info entry outside the support", pos + i);
  }

  Instance inst{n, k, std::move(truth), SideInfo(n, std::move(data)), std::move(f_plus),
                std::move(f_minus), seed};
  try {
    inst.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const InstanceError& e) {
    throw ParseError(e.what(), r.offset());
  }
  return inst;
}

void save(const Instance& instance, const std::filesystem::path& path) {
  write_file(path, serialize(instance));
}

Instance load(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 1 && bytes[0] == '{') return load_json(path);
  return deserialize(bytes);
}

void save_json(const Instance& instance, const std::filesystem::path& path) {
  if (instance.n > kJsonSidecarMaxN) {
    throw InstanceError("JSON sidecar is limited to n <= " + std::to_string(kJsonSidecarMaxN));
  }
  nlohmann::json j;
  j["format"] = "OCLB1-json";
  j["n"] = instance.n;
  j["k"] = instance.k;
  j["seed"] = instance.seed;
  j["fplus"] = instance.f_plus.to_string();
  j["fminus"] = instance.f_minus.to_string();
  j["truth"] = instance.truth;
  j["side_info"] = std::vector<int>(instance.side_info.raw().begin(), instance.side_info.raw().end());
  write_file(path, j.dump(1) + "\n");
}

Instance load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  try {
    if (j.at("format") != "OCLB1-json") throw ParseError("unknown format tag", 0);
    const auto n = j.at("n").get<std::size_t>();
    std::vector<std::uint8_t> data;
    for (int idx : j.at("side_info").get<std::vector<int>>()) {
      if (idx < 0 || idx > 255) throw ParseError("side info entry out of byte range", 0);
      data.push_back(static_cast<std::uint8_t>(idx));
    }
    if (data.size() != SideInfo::pair_count(n)) throw ParseError("side info has wrong length", 0);
    Instance inst{n,
                  j.at("k").get<std::size_t>(),
                  j.at("truth").get<std::vector<std::uint32_t>>(),
                  SideInfo(n, std::move(data)),
                  Distribution::parse(j.at("fplus").get<std::string>()),
                  Distribution::parse(j.at("fminus").get<std::string>()),
                  j.at("seed").get<std::uint64_t>()};
    inst.validate();
    return inst;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON instance: ") + e.what(), 0);
  }
}

}  // namespace ocl
