#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "hbound/discrete_pair.hpp"
#include "hbound/errors.hpp"
#include "hbound/moment_spec.hpp"

namespace hbound {

struct GaussianLaw {
  double mean = 0.0;
  double sd = 1.0;
};

/// Exponential law with the given mean parameter, translated by shift:
/// density (1/scale) exp(-(x - shift)/scale) on [shift, inf).
/// Mean = shift + scale, variance = scale^2.
struct ShiftedExponentialLaw {
  double scale = 1.0;
  double shift = 0.0;
};

inline bool is_valid(const GaussianLaw& law) noexcept {
  return std::isfinite(law.mean) && std::isfinite(law.sd) && law.sd > 0.0;
}

inline bool is_valid(const ShiftedExponentialLaw& law) noexcept {
  return std::isfinite(law.scale) && std::isfinite(law.shift) && law.scale > 0.0;
}

inline void validate(const GaussianLaw& law) {
  if (!is_valid(law)) throw InvalidLaw("gaussian law requires finite mean and sd > 0");
}

inline void validate(const ShiftedExponentialLaw& law) {
  if (!is_valid(law)) throw InvalidLaw("shifted exponential law requires scale > 0");
}

inline double mean(const GaussianLaw& law) noexcept { return law.mean; }
inline double variance(const GaussianLaw& law) noexcept { return law.sd * law.sd; }
inline double mean(const ShiftedExponentialLaw& law) noexcept { return law.shift + law.scale; }
inline double variance(const ShiftedExponentialLaw& law) noexcept {
  return law.scale * law.scale;
}

inline double cdf(const GaussianLaw& law, double x) noexcept {
  return 0.5 * std::erfc(-(x - law.mean) / (law.sd * std::numbers::sqrt2));
}

inline double cdf(const ShiftedExponentialLaw& law, double x) noexcept {
  if (x <= law.shift) return 0.0;
  return -std::expm1(-(x - law.shift) / law.scale);
}

/// Squared Hellinger distance between two Gaussians.
inline double gaussian_h2(const GaussianLaw& p, const GaussianLaw& q) {
  validate(p);
  validate(q);
  const double vp = p.sd * p.sd;
  const double vq = q.sd * q.sd;
  const double d = p.mean - q.mean;
  const double overlap =
      std::sqrt(2.0 * p.sd * q.sd / (vp + vq)) * std::exp(-d * d / (4.0 * (vp + vq)));
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

/// Squared Hellinger distance between two shifted exponentials; the two
/// branches exchange under swapping the laws, so it is symmetric.
inline double shifted_exponential_h2(const ShiftedExponentialLaw& p,
                                     const ShiftedExponentialLaw& q) {
  validate(p);
  validate(q);
  const double gap = std::abs(p.shift - q.shift);
  const double lower_scale = (p.shift >= q.shift) ? q.scale : p.scale;
  const double overlap =
      2.0 * std::sqrt(p.scale * q.scale) / (p.scale + q.scale) * std::exp(-gap / (2.0 * lower_scale));
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

/// Shifted exponential pair with the spec's means and variances:
/// scale = sigma, shift = mean - sigma per marginal.
inline std::pair<ShiftedExponentialLaw, ShiftedExponentialLaw> match_moments_exponential(
    const MomentSpec& spec) {
  validate(spec);
  if (spec.sigma_p == 0.0 || spec.sigma_q == 0.0) {
    throw DegenerateSpec("exponential moment matching needs positive sds");
  }
  return {ShiftedExponentialLaw{spec.sigma_p, spec.mean_p - spec.sigma_p},
          ShiftedExponentialLaw{spec.sigma_q, spec.mean_q - spec.sigma_q}};
}

/// One discretized marginal: bin midpoints plus exact bin probabilities
/// from CDF differences, renormalized over the truncation window.
struct DiscretizedLaw {
  std::vector<double> support;
  std::vector<double> probs;
  double tail_mass = 0.0;        // mass outside the truncation window
  double moment_residual = 0.0;  // max |mean error|, |variance error| vs the law
};

namespace detail {

constexpr double kTailTol = 1e-6;

inline void check_discretize_args(double radius, int bins) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameters("truncation radius must be positive and finite");
  }
  if (bins < 2) throw InvalidParameters("need at least 2 bins");
}

// Mass of [a, b] via one-sided tails so nothing cancels far from the bulk.
inline double mass_between(const GaussianLaw& law, double a, double b) noexcept {
  const auto upper = [&](double x) {
    return 0.5 * std::erfc((x - law.mean) / (law.sd * std::numbers::sqrt2));
  };
  if (0.5 * (a + b) >= law.mean) return std::max(0.0, upper(a) - upper(b));
  return std::max(0.0, cdf(law, b) - cdf(law, a));
}

inline double mass_between(const ShiftedExponentialLaw& law, double a, double b) noexcept {
  a = std::max(a, law.shift);
  if (b <= a) return 0.0;
  // exp(-(a-d)/s) * (1 - exp(-(b-a)/s)), evaluated in shifted coordinates.
  return std::exp(-(a - law.shift) / law.scale) * (-std::expm1(-(b - a) / law.scale));
}

template <class Law>
std::vector<double> bin_masses(const Law& law, double lo, double hi, int bins) {
  std::vector<double> masses(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) {
    const double a = lo + i * width;
    const double b = (i + 1 == bins) ? hi : lo + (i + 1) * width;
    masses[static_cast<std::size_t>(i)] = mass_between(law, a, b);
  }
  return masses;
}

inline std::vector<double> bin_midpoints(double lo, double hi, int bins) {
  std::vector<double> mid(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) {
    mid[static_cast<std::size_t>(i)] = lo + (i + 0.5) * width;
  }
  return mid;
}

inline void normalize(std::vector<double>& masses) {
  const double total = sum(masses);
  for (double& m : masses) m /= total;
}

template <class Law>
double window_tail(const Law& law, double lo, double hi) noexcept {
  return std::max(0.0, 1.0 - (cdf(law, hi) - cdf(law, lo)));
}

}  // namespace detail

/// Discretizes a law over [mean - radius, mean + radius] with the given
/// number of equal-width bins. Errors out if more than 1e-6 of the mass
/// lies outside the window instead of silently renormalizing it away.
template <class Law>
DiscretizedLaw discretize(const Law& law, double radius, int bins) {
  validate(law);
  detail::check_discretize_args(radius, bins);
  const double lo = mean(law) - radius;
  const double hi = mean(law) + radius;
  const double tail = detail::window_tail(law, lo, hi);
  if (tail > detail::kTailTol) {
    throw InsufficientCoverage("truncation window misses more than 1e-6 of the mass");
  }

  DiscretizedLaw out;
  out.tail_mass = tail;
  out.support = detail::bin_midpoints(lo, hi, bins);
  out.probs = detail::bin_masses(law, lo, hi, bins);
  detail::normalize(out.probs);

  const double m = detail::weighted_mean(out.support, out.probs);
  const double second = detail::weighted_second_moment(out.support, out.probs);
  out.moment_residual =
      std::max(std::abs(m - mean(law)), std::abs(second - m * m - variance(law)));
  return out;
}

/// Discretizes two laws on one shared grid spanning both means +- radius,
/// so hellinger_sq applies directly to the result.
template <class LawP, class LawQ>
DiscretePair discretize_pair(const LawP& law_p, const LawQ& law_q, double radius, int bins) {
  validate(law_p);
  validate(law_q);
  detail::check_discretize_args(radius, bins);
  const double lo = std::min(mean(law_p), mean(law_q)) - radius;
  const double hi = std::max(mean(law_p), mean(law_q)) + radius;
  if (detail::window_tail(law_p, lo, hi) > detail::kTailTol ||
      detail::window_tail(law_q, lo, hi) > detail::kTailTol) {
    throw InsufficientCoverage("truncation window misses more than 1e-6 of the mass");
  }
  std::vector<double> p = detail::bin_masses(law_p, lo, hi, bins);
  std::vector<double> q = detail::bin_masses(law_q, lo, hi, bins);
  detail::normalize(p);
  detail::normalize(q);
  return DiscretePair(detail::bin_midpoints(lo, hi, bins), std::move(p), std::move(q));
}

}  // namespace hbound
