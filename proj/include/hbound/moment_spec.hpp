#pragma once

#include <cmath>

#include "hbound/errors.hpp"

namespace hbound {

/// Mean and standard deviation constraints for a pair of probability laws.
/// Standard deviations are the canonical fields; variances are accepted only
/// at the edges (CLI flags, from_variances) and converted once.
struct MomentSpec {
  double mean_p = 0.0;
  double sigma_p = 0.0;
  double mean_q = 0.0;
  double sigma_q = 0.0;

  static MomentSpec from_sds(double mean_p, double sd_p, double mean_q, double sd_q) {
    return MomentSpec{mean_p, sd_p, mean_q, sd_q};
  }

  static MomentSpec from_variances(double mean_p, double var_p, double mean_q, double var_q) {
    if (!(var_p >= 0.0) || !(var_q >= 0.0)) {
      throw InvalidSpec("variance must be non-negative");
    }
    return MomentSpec{mean_p, std::sqrt(var_p), mean_q, std::sqrt(var_q)};
  }
};

inline bool is_valid(const MomentSpec& spec) noexcept {
  return std::isfinite(spec.mean_p) && std::isfinite(spec.mean_q) &&
         std::isfinite(spec.sigma_p) && std::isfinite(spec.sigma_q) &&
         spec.sigma_p >= 0.0 && spec.sigma_q >= 0.0;
}

inline void validate(const MomentSpec& spec) {
  if (!is_valid(spec)) {
    throw InvalidSpec("moment spec requires finite fields and non-negative sds");
  }
}

/// a of the attainer algebra: the gap between the two means.
inline double mean_gap(const MomentSpec& spec) noexcept { return spec.mean_p - spec.mean_q; }

/// b of the attainer algebra: sigma_q^2 - sigma_p^2, in difference-of-squares
/// form to keep accuracy when the sds are close.
inline double variance_gap(const MomentSpec& spec) noexcept {
  return (spec.sigma_q - spec.sigma_p) * (spec.sigma_q + spec.sigma_p);
}

}  // namespace hbound
