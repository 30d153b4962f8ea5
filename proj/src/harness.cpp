#include "ocl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "ocl/bounds.hpp"
#include "ocl/rng.hpp"
#include "ocl/solver_lv.hpp"

namespace ocl {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(path, "wrong type (" + std::string(j.type_name()) + ")");
  }
}

std::vector<std::size_t> positive_list(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_integer() || j[i].get<long long>() < 1) fail(p, "must be a positive integer");
    out.push_back(j[i].get<std::size_t>());
  }
  return out;
}

std::uint64_t algo_tag(const std::string& algo) {
  std::uint64_t h = 0;
  for (char c : algo) h = h * 131 + static_cast<unsigned char>(c);
  return h;
}

std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string fixed3(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, 3);
  return std::string(buf, ptr);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EmitError("cannot write " + path.string());
  out << text;
  if (!out) throw EmitError("write failed for " + path.string());
}

SolverOutput run_algo(const std::string& algo, const Instance& instance, const McConfig& mc,
                      std::uint64_t seed) {
  if (algo == "mc") return run_mc(instance, mc, seed);
  if (algo == "lv") return run_lv(instance, seed);
  return run_baseline(instance, seed);
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) fail("config", "expected an object");
  static const std::vector<std::string> known{"n",          "k",           "specs",
                                              "distributions", "algorithms", "trials",
                                              "base_seed",  "constants",   "threads",
                                              "record_time", "min_mc_success", "output"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) fail("config." + key, "unknown key");
  }
  ExperimentConfig c;
  if (!j.contains("n")) fail("config.n", "missing");
  c.n = positive_list(j.at("n"), "config.n");
  if (j.contains("k")) c.k = positive_list(j.at("k"), "config.k");

  if (j.contains("specs")) {
    const auto& specs = j.at("specs");
    if (!specs.is_array()) fail("config.specs", "expected an array");
    c.specs.clear();
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const std::string p = "config.specs[" + std::to_string(i) + "]";
      const auto& s = specs[i];
      SpecTemplate t;
      if (s.is_string() && s.get<std::string>() == "balanced") {
        t.kind = SpecTemplate::Kind::Balanced;
      } else if (s.is_object() && s.contains("skewed")) {
        t.kind = SpecTemplate::Kind::Skewed;
        t.ratio = get_as<double>(s.at("skewed"), p + ".skewed");
      } else if (s.is_object() && s.contains("sizes")) {
        t.kind = SpecTemplate::Kind::Sizes;
        t.sizes = positive_list(s.at("sizes"), p + ".sizes");
      } else {
        fail(p, "expected \"balanced\", {\"skewed\": ratio} or {\"sizes\": [...]}");
      }
      c.specs.push_back(std::move(t));
    }
  }

  if (!j.contains("distributions")) fail("config.distributions", "missing");
  const auto& dists = j.at("distributions");
  if (!dists.is_array()) fail("config.distributions", "expected an array");
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const std::string p = "config.distributions[" + std::to_string(i) + "]";
    if (!dists[i].is_object()) fail(p, "expected {\"fplus\": ..., \"fminus\": ...}");
    auto parse = [&](const char* key) {
      if (!dists[i].contains(key)) fail(p + "." + key, "missing");
      try {
        return Distribution::parse(get_as<std::string>(dists[i].at(key), p + "." + key));
      } catch (const DivergenceError& e) {
        fail(p + "." + key, e.what());
      }
    };
    c.distributions.push_back({parse("fplus"), parse("fminus")});
  }

  if (j.contains("algorithms")) {
    c.algorithms.clear();
    const auto& a = j.at("algorithms");
    if (!a.is_array()) fail("config.algorithms", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.algorithms.push_back(get_as<std::string>(a[i], "config.algorithms[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("trials")) {
    const auto& t = j.at("trials");
    if (!t.is_number_integer() || t.get<long long>() < 1) fail("config.trials", "must be >= 1");
    c.trials = t.get<std::size_t>();
  }
  if (j.contains("base_seed")) c.base_seed = get_as<std::uint64_t>(j.at("base_seed"), "config.base_seed");
  if (j.contains("threads")) c.threads = get_as<unsigned>(j.at("threads"), "config.threads");
  if (j.contains("record_time")) c.record_time = get_as<bool>(j.at("record_time"), "config.record_time");
  if (j.contains("min_mc_success")) {
    c.min_mc_success = get_as<double>(j.at("min_mc_success"), "config.min_mc_success");
  }
  if (j.contains("constants")) {
    const auto& k = j.at("constants");
    if (!k.is_object()) fail("config.constants", "expected an object");
    if (k.contains("c")) c.mc.consts.c = get_as<double>(k.at("c"), "config.constants.c");
    if (k.contains("c_prime")) c.mc.consts.c_prime = get_as<double>(k.at("c_prime"), "config.constants.c_prime");
    if (k.contains("scale")) c.mc.consts.scale = get_as<double>(k.at("scale"), "config.constants.scale");
    if (k.contains("band")) {
      try {
        c.mc.band = parse_band(get_as<std::string>(k.at("band"), "config.constants.band"));
      } catch (const std::invalid_argument& e) {
        fail("config.constants.band", e.what());
      }
    }
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) fail("config.output", "expected an object");
    if (o.contains("dir")) c.output.dir = get_as<std::string>(o.at("dir"), "config.output.dir");
    if (o.contains("csv")) c.output.csv = get_as<std::string>(o.at("csv"), "config.output.csv");
    if (o.contains("json")) c.output.json = get_as<std::string>(o.at("json"), "config.output.json");
    if (o.contains("svg")) c.output.svg = get_as<std::string>(o.at("svg"), "config.output.svg");
    if (o.contains("aggregate")) {
      c.output.aggregate = get_as<std::string>(o.at("aggregate"), "config.output.aggregate");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

void validate(const ExperimentConfig& c) {
  if (c.n.empty()) fail("config.n", "must list at least one n");
  if (c.trials < 1) fail("config.trials", "must be >= 1");
  if (c.distributions.empty()) fail("config.distributions", "must list at least one pair");
  if (c.algorithms.empty()) fail("config.algorithms", "must list at least one algorithm");
  for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
    const auto& a = c.algorithms[i];
    if (a != "mc" && a != "lv" && a != "baseline") {
      fail("config.algorithms[" + std::to_string(i) + "]", "unknown algorithm '" + a + "'");
    }
  }
  for (std::size_t i = 0; i < c.distributions.size(); ++i) {
    if (!c.distributions[i].f_plus.shares_support(c.distributions[i].f_minus)) {
      fail("config.distributions[" + std::to_string(i) + "]", "fplus and fminus support mismatch");
    }
  }
  const bool needs_k = std::any_of(c.specs.begin(), c.specs.end(), [](const SpecTemplate& s) {
    return s.kind != SpecTemplate::Kind::Sizes;
  });
  if (needs_k && c.k.empty()) fail("config.k", "required by balanced/skewed specs");
  for (std::size_t i = 0; i < c.specs.size(); ++i) {
    const auto& s = c.specs[i];
    const std::string p = "config.specs[" + std::to_string(i) + "]";
    if (s.kind == SpecTemplate::Kind::Skewed && !(s.ratio >= 1.0)) fail(p + ".skewed", "ratio must be >= 1");
    if (s.kind == SpecTemplate::Kind::Sizes && s.sizes.empty()) fail(p + ".sizes", "must be nonempty");
    if (s.kind != SpecTemplate::Kind::Sizes) {
      for (std::size_t n : c.n) {
        for (std::size_t k : c.k) {
          if (k > n) fail("config.k", "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
        }
      }
    }
  }
  try {
    c.mc.consts.validate();
  } catch (const std::invalid_argument& e) {
    fail("config.constants", e.what());
  }
  if (!(c.min_mc_success >= 0.0 && c.min_mc_success <= 1.0)) {
    fail("config.min_mc_success", "must lie in [0, 1]");
  }
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < config.distributions.size(); ++d) {
    for (const auto& s : config.specs) {
      if (s.kind == SpecTemplate::Kind::Sizes) {
        const std::size_t n = std::accumulate(s.sizes.begin(), s.sizes.end(), std::size_t{0});
        cells.push_back({cells.size(), n, s.sizes.size(), ExplicitSizes{s.sizes}, d});
        continue;
      }
      for (std::size_t n : config.n) {
        for (std::size_t k : config.k) {
          ClusterSpec spec = s.kind == SpecTemplate::Kind::Balanced ? ClusterSpec(Balanced{k})
                                                                    : ClusterSpec(Skewed{k, s.ratio});
          cells.push_back({cells.size(), n, k, std::move(spec), d});
        }
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t cell, std::size_t trial) {
  return hash_words({base, cell, trial});
}

Summary summarize(std::span<const RunReport> reports) {
  Summary s;
  s.trials = reports.size();
  if (reports.empty()) return s;
  std::vector<double> q;
  std::size_t exact = 0;
  for (const auto& r : reports) {
    q.push_back(static_cast<double>(r.queries));
    exact += r.exact ? 1 : 0;
  }
  s.median_queries = median_of(q);
  s.mean_queries = std::accumulate(q.begin(), q.end(), 0.0) / q.size();
  double var = 0.0;
  for (double x : q) var += (x - s.mean_queries) * (x - s.mean_queries);
  const double sd = q.size() > 1 ? std::sqrt(var / (q.size() - 1)) : 0.0;
  const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(q.size()));
  s.ci_low = s.mean_queries - half;
  s.ci_high = s.mean_queries + half;
  s.success_rate = static_cast<double>(exact) / reports.size();
  return s;
}

unsigned worker_count(unsigned requested) {
  unsigned workers = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("OCL_THREADS")) {
    unsigned value = 0;
    const std::string_view text(cap);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) {
      workers = std::min(workers, value);
    }
  }
  return std::max(1u, workers);
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  const std::vector<Cell> cells = expand_cells(config);
  const std::size_t algos = config.algorithms.size();
  const std::size_t tasks = cells.size() * config.trials;

  ExperimentResult result;
  result.reports.resize(tasks * algos);
  result.cell_of.resize(tasks * algos);

  auto run_task = [&](std::size_t task) {
    const Cell& cell = cells[task / config.trials];
    const std::size_t trial = task % config.trials;
    const std::uint64_t seed = trial_seed(config.base_seed, cell.index, trial);
    const auto& dist = config.distributions[cell.distribution];
    const Instance instance = generate(cell.n, cell.spec, dist.f_plus, dist.f_minus, seed);
    for (std::size_t a = 0; a < algos; ++a) {
      const std::string& algo = config.algorithms[a];
      SolverOutput out = run_algo(algo, instance, config.mc, hash_words({seed, algo_tag(algo)}));
      result.reports[task * algos + a] = std::move(out.report);
      result.cell_of[task * algos + a] = cell.index;
    }
  };

  const unsigned workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(tasks, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
        } catch (...) {
          errors[w] = std::current_exception();
          next = tasks;
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const Cell& cell : cells) {
    const auto& dist = config.distributions[cell.distribution];
    const double h = hellinger(dist.f_plus, dist.f_minus);
    for (std::size_t a = 0; a < algos; ++a) {
      std::vector<RunReport> group;
      for (std::size_t t = 0; t < config.trials; ++t) {
        group.push_back(result.reports[(cell.index * config.trials + t) * algos + a]);
      }
      result.aggregates.push_back({config.algorithms[a], cell.index, cell.n, cell.k, describe(cell.spec),
                                   dist.f_plus.to_string(), dist.f_minus.to_string(),
                                   summarize(group), lb_query_budget(cell.n, cell.k, h)});
    }
  }
  return result;
}

std::string runs_csv(std::span<const RunReport> reports, bool record_time) {
  std::string out = "algo,n,k,seed,queries,q_phase1,q_phase2,q_phase3,exact,misassigned,ms\n";
  for (const auto& r : reports) {
    out += r.algo + ',' + std::to_string(r.n) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.queries) + ',' +
           std::to_string(r.phases.phase1) + ',' + std::to_string(r.phases.phase2) + ',' +
           std::to_string(r.phases.phase3) + ',' + (r.exact ? "1" : "0") + ',' +
           std::to_string(r.misassigned) + ',' + (record_time ? fixed3(r.wall_ms) : "0") + '\n';
  }
  return out;
}

std::vector<RunReport> parse_runs_csv(std::string_view text) {
  std::vector<RunReport> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) return out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw EmitError("runs csv line " + std::to_string(line_no) + ": expected 11 fields");
    RunReport r;
    r.algo = f[0];
    r.n = std::stoull(f[1]);
    r.k = std::stoull(f[2]);
    r.seed = std::stoull(f[3]);
    r.queries = std::stoull(f[4]);
    r.phases = {std::stoull(f[5]), std::stoull(f[6]), std::stoull(f[7])};
    r.exact = f[8] == "1";
    r.misassigned = std::stoull(f[9]);
    r.wall_ms = std::stod(f[10]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string aggregate_csv(std::span<const AggregateRow> rows) {
  std::string out =
      "algo,cell,n,k,spec,fplus,fminus,trials,median_queries,mean_queries,ci_low,ci_high,"
      "success_rate,lb_query_budget\n";
  for (const auto& r : rows) {
    out += r.algo + ',' + std::to_string(r.cell) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + r.spec + ",\"" + r.f_plus + "\",\"" + r.f_minus + "\"," +
           std::to_string(r.summary.trials) + ',' + fmt_double(r.summary.median_queries) + ',' +
           fmt_double(r.summary.mean_queries) + ',' + fmt_double(r.summary.ci_low) + ',' +
           fmt_double(r.summary.ci_high) + ',' + fmt_double(r.summary.success_rate) + ',' +
           fmt_double(r.lb_budget) + '\n';
  }
  return out;
}

nlohmann::json experiment_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["reports"] = nlohmann::json::array();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    nlohmann::json r = result.reports[i];
    r["cell"] = result.cell_of[i];
    j["reports"].push_back(std::move(r));
  }
  j["aggregates"] = nlohmann::json::array();
  for (const auto& a : result.aggregates) {
    j["aggregates"].push_back({{"algo", a.algo},
                               {"cell", a.cell},
                               {"n", a.n},
                               {"k", a.k},
                               {"spec", a.spec},
                               {"fplus", a.f_plus},
                               {"fminus", a.f_minus},
                               {"trials", a.summary.trials},
                               {"median_queries", a.summary.median_queries},
                               {"mean_queries", a.summary.mean_queries},
                               {"ci_low", a.summary.ci_low},
                               {"ci_high", a.summary.ci_high},
                               {"success_rate", a.summary.success_rate},
                               {"lb_query_budget", a.lb_budget}});
  }
  return j;
}

std::vector<RunReport> reports_from_json(const nlohmann::json& j) {
  std::vector<RunReport> out;
  for (const auto& r : j.at("reports")) out.push_back(r.get<RunReport>());
  return out;
}

std::string queries_svg(const ExperimentResult& result) {
  // algo -> n -> medians of the cells at that n
  std::map<std::string, std::map<std::size_t, std::vector<double>>> series;
  std::map<std::size_t, std::vector<double>> bound;
  std::vector<std::string> algo_order;
  for (const auto& a : result.aggregates) {
    if (std::find(algo_order.begin(), algo_order.end(), a.algo) == algo_order.end()) {
      algo_order.push_back(a.algo);
    }
    series[a.algo][a.n].push_back(a.summary.median_queries);
    bound[a.n].push_back(a.lb_budget);
  }

  constexpr double width = 640, height = 400, margin = 50;
  double max_n = 1, min_n = 0, max_q = 1;
  if (!bound.empty()) {
    min_n = static_cast<double>(bound.begin()->first);
    max_n = static_cast<double>(bound.rbegin()->first);
  }
  for (const auto& [algo, pts] : series) {
    for (const auto& [n, v] : pts) max_q = std::max(max_q, median_of(v));
  }
  for (const auto& [n, v] : bound) max_q = std::max(max_q, median_of(v));
  auto x_of = [&](double n) {
    return max_n > min_n ? margin + (n - min_n) / (max_n - min_n) * (width - 2 * margin) : width / 2;
  };
  auto y_of = [&](double q) { return height - margin - q / max_q * (height - 2 * margin); };
  auto points = [&](const std::map<std::size_t, std::vector<double>>& pts) {
    std::string s;
    for (const auto& [n, v] : pts) {
      if (!s.empty()) s += ' ';
      s += fixed3(x_of(static_cast<double>(n))) + ',' + fixed3(y_of(median_of(v)));
    }
    return s;
  };

  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  svg += "<line x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  svg += "<line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n";
  svg += "<text x=\"320\" y=\"390\" text-anchor=\"middle\">n</text>\n";
  svg += "<text x=\"12\" y=\"200\" transform=\"rotate(-90 12 200)\" text-anchor=\"middle\">median queries (max " +
         fmt_double(max_q) + ")</text>\n";
  for (std::size_t i = 0; i < algo_order.size(); ++i) {
    const auto& algo = algo_order[i];
    const char* colour = colours[i % 5];
    svg += "<polyline class=\"algo\" data-algo=\"" + algo + "\" fill=\"none\" stroke=\"" + colour +
           "\" points=\"" + points(series[algo]) + "\"/>\n";
    svg += "<text x=\"480\" y=\"" + std::to_string(30 + 16 * i) + "\" fill=\"" + colour + "\">" + algo +
           "</text>\n";
  }
  svg += "<polyline class=\"bound\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\" points=\"" +
         points(bound) + "\"/>\n";
  svg += "<text x=\"480\" y=\"" + std::to_string(30 + 16 * algo_order.size()) +
         "\" fill=\"gray\">min(nk, k^2/H^2)</text>\n";
  svg += "</svg>\n";
  return svg;
}

void emit(const ExperimentResult& result, const ExperimentConfig& config) {
  const auto& out = config.output;
  std::error_code ec;
  std::filesystem::create_directories(out.dir, ec);
  if (ec) throw EmitError("cannot create " + out.dir.string() + ": " + ec.message());
  write_text(out.dir / out.csv, runs_csv(result.reports, config.record_time));
  write_text(out.dir / out.json, experiment_json(result).dump(1) + "\n");
  write_text(out.dir / out.aggregate, aggregate_csv(result.aggregates));
  write_text(out.dir / out.svg, queries_svg(result));
}

std::vector<std::string> check_gate(const ExperimentResult& result, const ExperimentConfig& config) {
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    if (r.algo == "mc") continue;
    if (!r.exact) failures.push_back(r.algo + " run seed " + std::to_string(r.seed) + " not exact");
    if (r.queries > r.n * r.k) {
      failures.push_back(r.algo + " run seed " + std::to_string(r.seed) + " exceeded nk queries");
    }
  }
  for (const auto& a : result.aggregates) {
    if (a.algo == "mc" && a.summary.success_rate < config.min_mc_success) {
      failures.push_back("mc cell " + std::to_string(a.cell) + " success rate " +
                         fmt_double(a.summary.success_rate) + " below " +
                         fmt_double(config.min_mc_success));
    }
  }
  return failures;
}

}  // namespace ocl
