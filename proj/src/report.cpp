#include "ocl/report.hpp"

namespace ocl {

void score(RunReport& report, const ClusteringState& state, const Instance& instance) {
  report.instance = instance.fingerprint();
  report.n = instance.n;
  report.k = instance.k;
  report.misassigned = misassigned(state, instance.truth);
  report.exact = report.misassigned == 0;
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json{{"algo", r.algo},
                     {"instance", r.instance},
                     {"n", r.n},
                     {"k", r.k},
                     {"seed", r.seed},
                     {"queries", r.queries},
                     {"phase_queries",
                      {{"phase1", r.phases.phase1},
                       {"phase2", r.phases.phase2},
                       {"phase3", r.phases.phase3}}},
                     {"exact", r.exact},
                     {"misassigned", r.misassigned},
                     {"wall_ms", r.wall_ms},
                     {"waiting", r.waiting}};
  if (r.constants) {
    j["constants"] = {{"c", r.constants->c},
                      {"c_prime", r.constants->c_prime},
                      {"b", r.constants->b},
                      {"scale", r.constants->scale},
                      {"band", r.constants->band}};
  } else {
    j["constants"] = nullptr;
  }
  j["h_estimate"] = r.h_estimate ? nlohmann::json(*r.h_estimate) : nlohmann::json(nullptr);
  j["m_threshold"] = r.m_threshold ? nlohmann::json(*r.m_threshold) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RunReport& r) {
  j.at("algo").get_to(r.algo);
  j.at("instance").get_to(r.instance);
  j.at("n").get_to(r.n);
  j.at("k").get_to(r.k);
  j.at("seed").get_to(r.seed);
  j.at("queries").get_to(r.queries);
  const auto& p = j.at("phase_queries");
  p.at("phase1").get_to(r.phases.phase1);
  p.at("phase2").get_to(r.phases.phase2);
  p.at("phase3").get_to(r.phases.phase3);
  j.at("exact").get_to(r.exact);
  j.at("misassigned").get_to(r.misassigned);
  j.at("wall_ms").get_to(r.wall_ms);
  r.waiting = j.value("waiting", std::uint64_t{0});
  r.constants.reset();
  if (j.contains("constants") && !j["constants"].is_null()) {
    const auto& c = j["constants"];
    r.constants = EffectiveConstants{c.at("c").get<double>(), c.at("c_prime").get<double>(),
                                     c.at("b").get<double>(), c.at("scale").get<double>(),
                                     c.at("band").get<std::string>()};
  }
  r.h_estimate.reset();
  if (j.contains("h_estimate") && !j["h_estimate"].is_null()) r.h_estimate = j["h_estimate"].get<double>();
  r.m_threshold.reset();
  if (j.contains("m_threshold") && !j["m_threshold"].is_null()) {
    r.m_threshold = j["m_threshold"].get<std::uint64_t>();
  }
}

}  // namespace ocl
