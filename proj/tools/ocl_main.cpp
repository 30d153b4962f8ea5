// ocl: instance generation, single solver runs, benchmark sweeps and
// lower-bound calculators.
//
//   ocl gen    --n 1000 --k 4 --fplus 0:0.2,1:0.8 --fminus 0:0.8,1:0.2 --seed 7 --out inst.oclb
//   ocl run    --algo mc --instance inst.oclb --seed 1 --scale 0.01
//   ocl bench  --config configs/desk.json --check
//   ocl bounds --form thm2 --n 10000 --k 10 --h 0.1
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 acceptance-gate failure (bench --check).

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ocl/bounds.hpp"
#include "ocl/divergence.hpp"
#include "ocl/harness.hpp"
#include "ocl/instance.hpp"
#include "ocl/solver_lv.hpp"
#include "ocl/solver_mc.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGate = 3;

struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigFailure("--sizes: bad cluster size '" + item + "'");
    }
  }
  return sizes;
}

ocl::Distribution parse_dist(const std::string& flag, const std::string& text) {
  try {
    return ocl::Distribution::parse(text);
  } catch (const ocl::DivergenceError& e) {
    throw ConfigFailure(flag + ": " + e.what());
  }
}

struct GenArgs {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string sizes;
  double skew = 0.0;
  std::string fplus, fminus;
  std::uint64_t seed = 0;
  std::string out;
  std::string json;
  unsigned threads = 1;
};

int do_gen(const GenArgs& a) {
  ocl::ClusterSpec spec = ocl::Balanced{a.k};
  if (!a.sizes.empty()) {
    spec = ocl::ExplicitSizes{parse_sizes(a.sizes)};
  } else if (a.skew > 0.0) {
    spec = ocl::Skewed{a.k, a.skew};
  } else if (a.k == 0) {
    throw ConfigFailure("gen: give --k, --sizes or --k with --skewed");
  }
  const auto fp = parse_dist("--fplus", a.fplus);
  const auto fm = parse_dist("--fminus", a.fminus);
  ocl::Instance inst = [&] {
    try {
      return ocl::generate(a.n, spec, fp, fm, a.seed, ocl::worker_count(a.threads));
    } catch (const ocl::InstanceError& e) {
      throw ConfigFailure(std::string("gen: ") + e.what());
    }
  }();
  ocl::save(inst, a.out);
  if (!a.json.empty()) ocl::save_json(inst, a.json);
  nlohmann::json summary{{"path", a.out},    {"n", inst.n},       {"k", inst.k},
                         {"q", inst.q()},    {"seed", inst.seed}, {"fingerprint", inst.fingerprint()},
                         {"spec", ocl::describe(spec)}};
  std::cout << summary.dump() << '\n';
  return 0;
}

struct RunArgs {
  std::string algo = "mc";
  std::string instance;
  std::uint64_t seed = 0;
  double scale = 1.0;
  double c = 118.0;
  double cprime = 3.0;
  std::string band = "lemma";
  std::string query_log;
};

int do_run(const RunArgs& a) {
  ocl::Instance inst = [&] {
    try {
      return ocl::load(a.instance);
    } catch (const ocl::InstanceError& e) {
      throw ConfigFailure(std::string("--instance: ") + e.what());
    }
  }();
  std::optional<std::ofstream> log_file;
  std::ostream* log = nullptr;
  if (!a.query_log.empty()) {
    log_file.emplace(a.query_log);
    if (!*log_file) throw ConfigFailure("--query-log: cannot open " + a.query_log);
    log = &*log_file;
  }
  ocl::SolverOutput out = [&] {
    if (a.algo == "mc") {
      ocl::McConfig config;
      config.consts = {a.c, a.cprime, a.scale};
      try {
        config.consts.validate();
        config.band = ocl::parse_band(a.band);
      } catch (const std::invalid_argument& e) {
        throw ConfigFailure(std::string("run: ") + e.what());
      }
      return ocl::run_mc(inst, config, a.seed, log);
    }
    if (a.algo == "lv") return ocl::run_lv(inst, a.seed, log);
    return ocl::run_baseline(inst, a.seed, log);
  }();
  std::cout << nlohmann::json(out.report).dump(1) << '\n';
  return 0;
}

struct BenchArgs {
  std::string config;
  std::optional<unsigned> threads;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> base_seed;
  std::optional<double> scale;
  std::string out;
  bool timing = false;
  bool check = false;
};

int do_bench(const BenchArgs& a) {
  ocl::ExperimentConfig config;
  try {
    config = ocl::load_config(a.config);
    if (a.trials) config.trials = *a.trials;
    if (a.base_seed) config.base_seed = *a.base_seed;
    if (a.scale) config.mc.consts.scale = *a.scale;
    if (a.threads) config.threads = *a.threads;
    if (!a.out.empty()) config.output.dir = a.out;
    if (a.timing) config.record_time = true;
    ocl::validate(config);
  } catch (const ocl::ConfigError& e) {
    throw ConfigFailure(e.what());
  }
  const ocl::ExperimentResult result = ocl::run_experiment(config, config.threads);
  ocl::emit(result, config);
  std::cerr << "bench: " << result.reports.size() << " runs written to " << config.output.dir.string()
            << '\n';
  for (const auto& row : result.aggregates) {
    std::cerr << "  " << row.algo << " n=" << row.n << " k=" << row.k << " " << row.spec
              << " median=" << row.summary.median_queries << " success=" << row.summary.success_rate
              << " lb=" << row.lb_budget << '\n';
  }
  if (a.check) {
    const auto failures = ocl::check_gate(result, config);
    for (const auto& f : failures) std::cerr << "GATE FAIL: " << f << '\n';
    if (!failures.empty()) return kExitGate;
    std::cerr << "gate: pass\n";
  }
  return 0;
}

struct BoundsArgs {
  std::string form;
  std::optional<std::size_t> n, k, a;
  double q = 0.0;
  std::optional<double> h;
  std::string fplus, fminus;
  bool approx = false;
};

int do_bounds(const BoundsArgs& a) {
  nlohmann::json inputs;
  const ocl::BoundMode mode = a.approx ? ocl::BoundMode::Approx : ocl::BoundMode::Exact;
  std::optional<ocl::Distribution> fp, fm;
  if (!a.fplus.empty()) fp = parse_dist("--fplus", a.fplus);
  if (!a.fminus.empty()) fm = parse_dist("--fminus", a.fminus);
  auto need_k = [&] {
    if (!a.k) throw ConfigFailure("bounds: --k is required");
    inputs["k"] = *a.k;
    return *a.k;
  };
  auto need_n = [&] {
    if (!a.n) throw ConfigFailure("bounds: --n is required");
    inputs["n"] = *a.n;
    return *a.n;
  };
  auto need_h = [&] {
    double h = 0.0;
    if (a.h) {
      h = *a.h;
    } else if (fp && fm) {
      h = ocl::hellinger(*fp, *fm);
    } else {
      throw ConfigFailure("bounds: give --h or both --fplus and --fminus");
    }
    inputs["h"] = h;
    return h;
  };
  auto need_dists = [&] {
    if (!fp || !fm) throw ConfigFailure("bounds: --fplus and --fminus are required");
    inputs["fplus"] = fp->to_string();
    inputs["fminus"] = fm->to_string();
  };

  double value = 0.0;
  try {
    if (a.form == "lemma1") {
      ocl::LowerBoundInputs in;
      in.k = need_k();
      if (a.a) {
        in.a = *a.a;
      } else if (a.n) {
        in.a = *a.n / in.k;
      } else {
        throw ConfigFailure("bounds: lemma1 needs --a or --n");
      }
      in.queries = a.q;
      in.h = need_h();
      inputs["a"] = in.a;
      inputs["q"] = in.queries;
      value = ocl::lb_error_prob(in);
    } else if (a.form == "thm2") {
      const auto n = need_n();
      const auto k = need_k();
      value = ocl::lb_query_budget(n, k, need_h());
    } else if (a.form == "fano-kl") {
      const auto n = need_n();
      const auto k = need_k();
      need_dists();
      value = ocl::fano_zero_query_kl(n, k, *fp, *fm, mode);
    } else if (a.form == "fano-hellinger") {
      const auto n = need_n();
      const auto k = need_k();
      need_dists();
      value = ocl::fano_zero_query_hellinger(n, k, *fp, *fm, mode);
    } else {
      throw ConfigFailure("bounds: unknown --form '" + a.form + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigFailure(std::string("bounds: ") + e.what());
  }
  nlohmann::json out{{"form", a.form},
                     {"value", value},
                     {"inputs", inputs},
                     {"mode", a.approx ? "approx" : "exact"}};
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive clustering with a same-cluster oracle and side information"};
  app.require_subcommand(1);
  // Keep -h free: the bounds subcommand takes --h for the Hellinger distance.
  app.set_help_flag("--help", "Print this help message and exit");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a planted instance");
  gen_cmd->add_option("--n", gen.n, "Number of elements")->required();
  gen_cmd->add_option("--k", gen.k, "Number of clusters (balanced or skewed)");
  gen_cmd->add_option("--sizes", gen.sizes, "Explicit comma-separated cluster sizes");
  gen_cmd->add_option("--skewed", gen.skew, "Largest/smallest size ratio (with --k)");
  gen_cmd->add_option("--fplus", gen.fplus, "Intra-cluster pmf, v:p,...")->required();
  gen_cmd->add_option("--fminus", gen.fminus, "Inter-cluster pmf, v:p,...")->required();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output instance file")->required();
  gen_cmd->add_option("--json", gen.json, "Also write a JSON sidecar (n <= 200)");
  gen_cmd->add_option("--threads", gen.threads, "Generation threads");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one solver and print its report");
  run_cmd->add_option("--algo", run.algo, "mc | lv | baseline")
      ->check(CLI::IsMember({"mc", "lv", "baseline"}));
  run_cmd->add_option("--instance", run.instance, "Instance file")->required();
  run_cmd->add_option("--seed", run.seed, "Solver seed");
  run_cmd->add_option("--scale", run.scale, "Multiplier on C for size thresholds");
  run_cmd->add_option("--c", run.c, "Constant C");
  run_cmd->add_option("--cprime", run.cprime, "Constant C'");
  run_cmd->add_option("--band", run.band, "lemma | text")->check(CLI::IsMember({"lemma", "text"}));
  run_cmd->add_option("--query-log", run.query_log, "Write step,u,v,answer CSV of charged queries");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
  bench_cmd->add_option("--config", bench.config, "Sweep configuration (JSON)")->required();
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (capped by OCL_THREADS)");
  bench_cmd->add_option("--trials", bench.trials, "Override trials per cell");
  bench_cmd->add_option("--base-seed", bench.base_seed, "Override base seed");
  bench_cmd->add_option("--scale", bench.scale, "Override constants.scale");
  bench_cmd->add_option("--out", bench.out, "Override output directory");
  bench_cmd->add_flag("--timing", bench.timing, "Record wall time in the CSV ms column");
  bench_cmd->add_flag("--check", bench.check, "Exit 3 if the acceptance gate fails");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate a lower bound");
  bounds_cmd->add_option("--form", bounds.form, "lemma1 | thm2 | fano-kl | fano-hellinger")
      ->required()
      ->check(CLI::IsMember({"lemma1", "thm2", "fano-kl", "fano-hellinger"}));
  bounds_cmd->add_option("--n", bounds.n, "Number of elements");
  bounds_cmd->add_option("--k", bounds.k, "Number of clusters");
  bounds_cmd->add_option("--a", bounds.a, "Cluster size (lemma1)");
  bounds_cmd->add_option("--q", bounds.q, "Query budget (lemma1)");
  bounds_cmd->add_option("--h", bounds.h, "Hellinger distance H(f+||f-)");
  bounds_cmd->add_option("--fplus", bounds.fplus, "Intra-cluster pmf");
  bounds_cmd->add_option("--fminus", bounds.fminus, "Inter-cluster pmf");
  bounds_cmd->add_flag("--approx", bounds.approx, "Use the asymptotic approximations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen_cmd) return do_gen(gen);
    if (*run_cmd) return do_run(run);
    if (*bench_cmd) return do_bench(bench);
    if (*bounds_cmd) return do_bounds(bounds);
  } catch (const ConfigFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
