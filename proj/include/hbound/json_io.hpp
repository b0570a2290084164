#pragma once

#include <string>

#include "json.hpp"

#include "hbound/bounds.hpp"
#include "hbound/closed_forms.hpp"
#include "hbound/discrete_pair.hpp"
#include "hbound/moment_spec.hpp"
#include "hbound/verify.hpp"

namespace hbound {

using nlohmann::json;

inline void to_json(json& j, const MomentSpec& spec) {
  j = json{{"mean_p", spec.mean_p},
           {"sigma_p", spec.sigma_p},
           {"mean_q", spec.mean_q},
           {"sigma_q", spec.sigma_q}};
}

inline void from_json(const json& j, MomentSpec& spec) {
  j.at("mean_p").get_to(spec.mean_p);
  j.at("sigma_p").get_to(spec.sigma_p);
  j.at("mean_q").get_to(spec.mean_q);
  j.at("sigma_q").get_to(spec.sigma_q);
}

inline void to_json(json& j, const DiscretePair& pair) {
  j = json{{"support", pair.support()}, {"p", pair.p()}, {"q", pair.q()}};
}

inline DiscretePair discrete_pair_from_json(const json& j) {
  return DiscretePair(j.at("support").get<std::vector<double>>(),
                      j.at("p").get<std::vector<double>>(),
                      j.at("q").get<std::vector<double>>());
}

inline void to_json(json& j, const BinaryAttainer& att) {
  j = json{{"r", att.r},   {"s", att.s}, {"u1", att.u1}, {"u2", att.u2},
           {"a", att.a},   {"b", att.b}, {"v", att.v}};
}

inline void to_json(json& j, const BetaFactors& betas) {
  j = json{{"beta_min", betas.beta_min}, {"beta_max", betas.beta_max}};
}

inline void to_json(json& j, const BoundReport& report) {
  j = json{{"hellinger_lb", report.hellinger_lb},
           {"bhattacharyya_ub", report.bhattacharyya_ub},
           {"comparison_lb", report.comparison_lb}};
  if (report.betas) {
    j["beta_min"] = report.betas->beta_min;
    j["beta_max"] = report.betas->beta_max;
  } else {
    j["beta_min"] = nullptr;
    j["beta_max"] = nullptr;
  }
  if (report.attainer) {
    j["attainer"] = *report.attainer;
  } else {
    j["attainer"] = nullptr;
  }
}

NLOHMANN_JSON_SERIALIZE_ENUM(RecordKind, {{RecordKind::sampled, "sampled"},
                                          {RecordKind::optimized, "optimized"},
                                          {RecordKind::sequence, "sequence"}})

inline void to_json(json& j, const VerificationRecord& record) {
  j = json{{"kind", record.kind},
           {"achieved_h2", record.achieved_h2},
           {"bound", record.bound},
           {"gap", record.gap},
           {"moment_residual", record.moment_residual},
           {"pair", record.pair}};
}

inline void to_json(json& j, const VerificationSummary& summary) {
  j = json{{"min_gap", summary.min_gap},
           {"violation_count", summary.violation_count},
           {"optimizer_converged", summary.optimizer_converged},
           {"two_point_concentrated", summary.two_point_concentrated},
           {"best_gap", summary.best_gap},
           {"errors", summary.errors}};
}

inline void to_json(json& j, const VerificationConfig& config) {
  j = json{{"n_points", config.n_points},   {"radius", config.radius},
           {"n_trials", config.n_trials},   {"n_restarts", config.n_restarts},
           {"seed", config.seed},           {"tol_moments", config.tol_moments},
           {"tol_gap", config.tol_gap}};
}

inline void from_json(const json& j, VerificationConfig& config) {
  if (j.contains("n_points")) j.at("n_points").get_to(config.n_points);
  if (j.contains("radius")) j.at("radius").get_to(config.radius);
  if (j.contains("n_trials")) j.at("n_trials").get_to(config.n_trials);
  if (j.contains("n_restarts")) j.at("n_restarts").get_to(config.n_restarts);
  if (j.contains("seed")) j.at("seed").get_to(config.seed);
  if (j.contains("tol_moments")) j.at("tol_moments").get_to(config.tol_moments);
  if (j.contains("tol_gap")) j.at("tol_gap").get_to(config.tol_gap);
}

}  // namespace hbound
