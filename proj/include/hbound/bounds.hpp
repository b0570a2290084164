#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hbound/discrete_pair.hpp"
#include "hbound/errors.hpp"
#include "hbound/moment_spec.hpp"

namespace hbound {

/// The unique two-point pair matching a MomentSpec with distinct means:
/// support {u2, u1}, P-masses {1-r, r}, Q-masses {1-s, s}. The complements
/// 1-r and 1-s are carried explicitly because for near-equal means r and s
/// approach {0,1} closer than one ulp of 1; recomputing 1-r from the rounded
/// r would destroy them.
struct BinaryAttainer {
  double r = 0.0;
  double s = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double a = 0.0;  // mean gap
  double b = 0.0;  // variance gap
  double v = 0.0;
  double one_minus_r = 1.0;
  double one_minus_s = 1.0;
};

/// Binary squared Hellinger distance between two laws on the same 2-point
/// set, with P(u1) = r and Q(u1) = s.
inline double binary_h2(double r, double s) {
  if (!(r >= 0.0 && r <= 1.0) || !(s >= 0.0 && s <= 1.0)) {
    throw InvalidParameters("binary_h2 arguments must lie in [0, 1]");
  }
  const double d1 = std::sqrt(r) - std::sqrt(s);
  const double d2 = std::sqrt(1.0 - r) - std::sqrt(1.0 - s);
  return 0.5 * (d1 * d1 + d2 * d2);
}

namespace detail {

// Mass pair (value, 1-value) for a mass x in [0,1] given t = 4x(1-x) and
// h = |2x - 1|. The small side t/(2(1+h)) and the large side (1+h)/2 sum to
// one identically and each holds full relative precision, which matters
// because the extreme masses fall below one ulp of 1.
struct SplitMass {
  double value;
  double complement;
};

inline SplitMass split_mass(double t, double h, bool large_side) {
  const double small = t / (2.0 * (1.0 + h));
  const double big = 0.5 * (1.0 + h);
  if (large_side) return {big, small};
  return {small, big};
}

inline BinaryAttainer attainer_core(double mean_p, double sigma_p, double mean_q,
                                    double sigma_q) {
  // Requires sigma_p > 0 and mean_p != mean_q.
  const double a = mean_p - mean_q;
  const double b = (sigma_q - sigma_p) * (sigma_q + sigma_p);
  const double splus = sigma_p + sigma_q;
  const double sminus = sigma_p - sigma_q;
  // 4 a^2 v^2 = (a^2 + (sp+sq)^2)(a^2 + (sp-sq)^2); the factored form never
  // cancels, unlike b^2 + 2a^2(sp^2+sq^2) + a^4 read literally.
  const double v =
      std::sqrt((a * a + splus * splus) * (a * a + sminus * sminus)) / (2.0 * std::abs(a));

  // sqrt(r(1-r)) = sigma_p/(2v) and |2r - 1| = |b + a^2|/(2|a|v): the latter
  // follows from 4a^2(v^2 - sigma_p^2) = (a^2 + b)^2, so neither side of the
  // split is ever formed by subtraction. Signs come from (b +- a^2)/a.
  const double tr = (sigma_p / v) * (sigma_p / v);
  const double ts = (sigma_q / v) * (sigma_q / v);
  const double hr = std::min(1.0, std::abs(b + a * a) / (2.0 * std::abs(a) * v));
  const double hs = std::min(1.0, std::abs(b - a * a) / (2.0 * std::abs(a) * v));
  const bool r_large = ((b + a * a) / a) > 0.0;
  const bool s_large = ((b - a * a) / a) > 0.0;
  const auto [r, one_minus_r] = split_mass(tr, hr, r_large);
  const auto [s, one_minus_s] = split_mass(ts, hs, s_large);

  BinaryAttainer att;
  att.a = a;
  att.b = b;
  att.v = v;
  att.r = r;
  att.one_minus_r = one_minus_r;
  att.s = s;
  att.one_minus_s = one_minus_s;
  att.u1 = mean_p + sigma_p * std::sqrt(one_minus_r / r);
  att.u2 = mean_p - sigma_p * std::sqrt(r / one_minus_r);
  return att;
}

}  // namespace detail

/// The unique element of P_2 with the prescribed means and variances.
/// Throws EqualMeans when the mean gap vanishes (the infimum 0 is then not
/// attained by any pair).
inline BinaryAttainer binary_attainer(const MomentSpec& spec) {
  validate(spec);
  const double a = mean_gap(spec);
  if (a == 0.0) {
    throw EqualMeans("binary attainer undefined for equal means");
  }

  if (spec.sigma_p == 0.0 && spec.sigma_q == 0.0) {
    // Two point masses on a shared 2-point support.
    BinaryAttainer att;
    att.a = a;
    att.b = 0.0;
    att.v = 0.5 * std::abs(a);
    att.r = 1.0;
    att.one_minus_r = 0.0;
    att.s = 0.0;
    att.one_minus_s = 1.0;
    att.u1 = spec.mean_p;
    att.u2 = spec.mean_q;
    return att;
  }

  if (spec.sigma_p == 0.0) {
    // u1, u2 collapse onto mean_p when built from the P marginal; build from
    // the Q marginal with the roles swapped, then restore the labels. The
    // swap maps (r, s) -> (s, r) and leaves the support points in place.
    BinaryAttainer swapped =
        detail::attainer_core(spec.mean_q, spec.sigma_q, spec.mean_p, spec.sigma_p);
    BinaryAttainer att;
    att.a = a;
    att.b = variance_gap(spec);
    att.v = swapped.v;
    att.r = swapped.s;
    att.one_minus_r = swapped.one_minus_s;
    att.s = swapped.r;
    att.one_minus_s = swapped.one_minus_r;
    att.u1 = swapped.u1;
    att.u2 = swapped.u2;
    return att;
  }

  return detail::attainer_core(spec.mean_p, spec.sigma_p, spec.mean_q, spec.sigma_q);
}

/// Materializes the attainer as a DiscretePair (support sorted ascending).
inline DiscretePair attainer_pair(const BinaryAttainer& att) {
  if (att.u1 == att.u2) {
    throw DegenerateSpec("attainer support points coincide");
  }
  std::vector<double> u{att.u1, att.u2};
  std::vector<double> p{att.r, att.one_minus_r};
  std::vector<double> q{att.s, att.one_minus_s};
  if (u[0] > u[1]) {
    std::swap(u[0], u[1]);
    std::swap(p[0], p[1]);
    std::swap(q[0], q[1]);
  }
  return DiscretePair(std::move(u), std::move(p), std::move(q));
}

/// Tight lower bound on the squared Hellinger distance over all pairs with
/// the given means and variances: 1 - sqrt(1 - a^2/(a^2 + (sp+sq)^2)) when
/// the means differ, 0 otherwise (an infimum, not attained). Evaluated as
/// x/(1 + sqrt(1-x)) so nothing cancels when x is tiny.
inline double hellinger_lower_bound(const MomentSpec& spec) {
  validate(spec);
  const double a = mean_gap(spec);
  if (a == 0.0) return 0.0;
  const double ratio = (spec.sigma_p + spec.sigma_q) / std::abs(a);
  if (ratio > 1e150) {
    const double inv = 1.0 / ratio;
    return 0.5 * inv * inv;
  }
  const double y = ratio * ratio;
  const double x = 1.0 / (1.0 + y);
  const double one_minus_x = y / (1.0 + y);
  return x / (1.0 + std::sqrt(one_minus_x));
}

/// Tight upper bound on the Bhattacharyya coefficient; the exact complement
/// of hellinger_lower_bound.
inline double bhattacharyya_upper_bound(const MomentSpec& spec) {
  return 1.0 - hellinger_lower_bound(spec);
}

/// The comparison lower bound l = a^2 / (2(a^2 + 2(sp^2 + sq^2))). Weaker
/// than the tight bound by a factor between beta_min and beta_max.
inline double comparison_bound(const MomentSpec& spec) {
  validate(spec);
  const double a = mean_gap(spec);
  if (a == 0.0) return 0.0;
  const double rp = spec.sigma_p / std::abs(a);
  const double rq = spec.sigma_q / std::abs(a);
  if (rp > 1e150 || rq > 1e150) return 0.0;
  return 1.0 / (2.0 + 4.0 * (rp * rp + rq * rq));
}

struct BetaFactors {
  double beta_min = 1.0;
  double beta_max = 2.0;
};

/// Sandwich factors of the comparison bound: with g(x) = (1+x)/(1+sqrt(x))^2,
/// beta_{min,max} = 2 {min,max} of g(s/r) and g((1-s)/(1-r)), both in [1, 2].
/// Undefined when the attainer sits on the boundary r in {0, 1}, which
/// happens exactly when sigma_p = 0.
inline BetaFactors beta_factors(const MomentSpec& spec) {
  const BinaryAttainer att = binary_attainer(spec);
  if (spec.sigma_p == 0.0) {
    throw BoundaryAttainer("beta factors undefined: attainer has r in {0, 1}");
  }
  const auto g = [](double x) {
    const double root = std::sqrt(x);
    return (1.0 + x) / ((1.0 + root) * (1.0 + root));
  };
  // r and 1-r are each accurate in relative terms, so the ratios are too.
  const double b1 = 2.0 * g(att.s / att.r);
  const double b2 = 2.0 * g(att.one_minus_s / att.one_minus_r);
  return BetaFactors{std::min(b1, b2), std::max(b1, b2)};
}

/// Every bound and factor for one spec. The attainer (and the beta factors,
/// which need it off the boundary) are absent exactly when no pair attains
/// the bound: equal means for the attainer, sigma_p = 0 for the betas.
struct BoundReport {
  double hellinger_lb = 0.0;
  double bhattacharyya_ub = 1.0;
  double comparison_lb = 0.0;
  std::optional<BetaFactors> betas;
  std::optional<BinaryAttainer> attainer;
};

inline BoundReport bound_report(const MomentSpec& spec) {
  validate(spec);
  BoundReport report;
  report.hellinger_lb = hellinger_lower_bound(spec);
  report.bhattacharyya_ub = 1.0 - report.hellinger_lb;
  report.comparison_lb = comparison_bound(spec);
  if (mean_gap(spec) != 0.0) {
    report.attainer = binary_attainer(spec);
    if (spec.sigma_p != 0.0) {
      report.betas = beta_factors(spec);
    }
  }
  return report;
}

}  // namespace hbound
