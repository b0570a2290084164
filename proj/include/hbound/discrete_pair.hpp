#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "hbound/errors.hpp"
#include "hbound/moment_spec.hpp"

namespace hbound {

namespace detail {

/// Neumaier-compensated accumulator; keeps probability sums accurate enough
/// that the fixed 1e-12 normalization tolerance is meaningful even for
/// 2^14-bin discretizations.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const noexcept { return sum + comp; }
};

inline double sum(const std::vector<double>& xs) noexcept {
  KahanSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

inline double weighted_mean(const std::vector<double>& u, const std::vector<double>& p) noexcept {
  KahanSum acc;
  for (std::size_t i = 0; i < u.size(); ++i) acc.add(p[i] * u[i]);
  return acc.value();
}

inline double weighted_second_moment(const std::vector<double>& u,
                                     const std::vector<double>& p) noexcept {
  KahanSum acc;
  for (std::size_t i = 0; i < u.size(); ++i) acc.add(p[i] * u[i] * u[i]);
  return acc.value();
}

}  // namespace detail

/// Two probability vectors on a shared, strictly increasing finite support.
/// Construction repairs what is safely repairable (sorts, merges duplicate
/// points by summing masses, clamps sub-1e-12 negative dust, renormalizes
/// sums within 1e-12 of one) and rejects everything else. Instances are
/// immutable afterwards.
class DiscretePair {
 public:
  static constexpr double kNormalizationTol = 1e-12;

  DiscretePair(std::vector<double> support, std::vector<double> probs_p,
               std::vector<double> probs_q)
      : support_(std::move(support)), p_(std::move(probs_p)), q_(std::move(probs_q)) {
    const std::size_t n = support_.size();
    if (n == 0 || p_.size() != n || q_.size() != n) {
      throw InvalidPair("support and probability vectors must share a non-zero length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(support_[i]) || !std::isfinite(p_[i]) || !std::isfinite(q_[i])) {
        throw InvalidPair("non-finite entry in discrete pair");
      }
      if (p_[i] < -kNormalizationTol || q_[i] < -kNormalizationTol) {
        throw InvalidPair("negative probability mass");
      }
      p_[i] = std::max(p_[i], 0.0);
      q_[i] = std::max(q_[i], 0.0);
    }

    sort_and_merge();

    const double sp = detail::sum(p_);
    const double sq = detail::sum(q_);
    if (std::abs(sp - 1.0) > kNormalizationTol || std::abs(sq - 1.0) > kNormalizationTol) {
      throw InvalidPair("probability vector does not sum to one within 1e-12");
    }
    for (std::size_t i = 0; i < p_.size(); ++i) {
      p_[i] /= sp;
      q_[i] /= sq;
    }
  }

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& p() const noexcept { return p_; }
  const std::vector<double>& q() const noexcept { return q_; }
  std::size_t size() const noexcept { return support_.size(); }

 private:
  void sort_and_merge() {
    const std::size_t n = support_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });

    std::vector<double> u, p, q;
    u.reserve(n);
    p.reserve(n);
    q.reserve(n);
    for (std::size_t idx : order) {
      if (!u.empty() && support_[idx] == u.back()) {
        p.back() += p_[idx];
        q.back() += q_[idx];
      } else {
        u.push_back(support_[idx]);
        p.push_back(p_[idx]);
        q.push_back(q_[idx]);
      }
    }
    support_ = std::move(u);
    p_ = std::move(p);
    q_ = std::move(q);
  }

  std::vector<double> support_;
  std::vector<double> p_;
  std::vector<double> q_;
};

/// Means and standard deviations of both marginals. The variance is summed
/// in centered form sum p_i (u_i - mean)^2, which keeps full relative
/// precision even when the pair mixes huge support points with tiny masses
/// (the uncentered second moment cancels against mean^2 there). A computed
/// variance more than 1e-12 below zero relative to the moment scale is
/// corruption; within that it is clamped to the point-mass value 0.
inline MomentSpec moments_of(const DiscretePair& pair) {
  const auto marginal = [&](const std::vector<double>& probs) {
    const double mean = detail::weighted_mean(pair.support(), probs);
    detail::KahanSum centered;
    for (std::size_t i = 0; i < pair.size(); ++i) {
      const double d = pair.support()[i] - mean;
      centered.add(probs[i] * d * d);
    }
    double var = centered.value();
    const double floor = -1e-12 * std::max(1.0, std::abs(var) + mean * mean);
    if (var < floor) {
      throw InvalidPair("negative variance beyond rounding tolerance");
    }
    var = std::max(var, 0.0);
    return std::pair<double, double>{mean, std::sqrt(var)};
  };
  const auto [mp, sp] = marginal(pair.p());
  const auto [mq, sq] = marginal(pair.q());
  return MomentSpec{mp, sp, mq, sq};
}

/// Squared Hellinger distance (1/2) sum_i (sqrt(p_i) - sqrt(q_i))^2 in [0, 1].
inline double hellinger_sq(const DiscretePair& pair) {
  detail::KahanSum acc;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const double d = std::sqrt(pair.p()[i]) - std::sqrt(pair.q()[i]);
    acc.add(d * d);
  }
  return std::clamp(0.5 * acc.value(), 0.0, 1.0);
}

/// Bhattacharyya coefficient sum_i sqrt(p_i q_i) in [0, 1]; complements
/// hellinger_sq within 1e-12.
inline double bhattacharyya(const DiscretePair& pair) {
  detail::KahanSum acc;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    acc.add(std::sqrt(pair.p()[i] * pair.q()[i]));
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

}  // namespace hbound
