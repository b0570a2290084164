#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hbound/bounds.hpp"
#include "hbound/closed_forms.hpp"

using namespace hbound;

TEST_CASE("gaussian h2 reproduces the worked examples") {
  CHECK(gaussian_h2(GaussianLaw{10.0, 10.0}, GaussianLaw{3.0, 3.0}) ==
        Catch::Approx(0.337).margin(5e-4));
  CHECK(gaussian_h2(GaussianLaw{20.0, std::sqrt(30.0)}, GaussianLaw{10.0, std::sqrt(20.0)}) ==
        Catch::Approx(0.400).margin(5e-4));
  CHECK(gaussian_h2(GaussianLaw{1.5, 2.0}, GaussianLaw{1.5, 2.0}) == 0.0);
}

TEST_CASE("gaussian h2 is symmetric and reduces for equal sds") {
  const GaussianLaw p{2.0, 1.3}, q{-1.0, 0.7};
  CHECK(gaussian_h2(p, q) == Catch::Approx(gaussian_h2(q, p)).margin(1e-15));

  const double a = 3.0, sd = 1.7;
  CHECK(gaussian_h2(GaussianLaw{0.0, sd}, GaussianLaw{a, sd}) ==
        Catch::Approx(1.0 - std::exp(-a * a / (8.0 * sd * sd))).margin(1e-14));
}

TEST_CASE("gaussian h2 rejects invalid laws") {
  CHECK_THROWS_AS(gaussian_h2(GaussianLaw{0.0, 0.0}, GaussianLaw{1.0, 1.0}), InvalidLaw);
  CHECK_THROWS_AS(gaussian_h2(GaussianLaw{0.0, -1.0}, GaussianLaw{1.0, 1.0}), InvalidLaw);
}

TEST_CASE("shifted exponential h2 reproduces the worked examples") {
  const auto [p1, q1] = match_moments_exponential(MomentSpec::from_variances(10, 100, 3, 9));
  CHECK(shifted_exponential_h2(p1, q1) == Catch::Approx(0.157).margin(5e-4));

  const auto [p2, q2] = match_moments_exponential(MomentSpec::from_variances(20, 30, 10, 20));
  CHECK(shifted_exponential_h2(p2, q2) == Catch::Approx(0.636).margin(5e-4));

  const ShiftedExponentialLaw same{2.0, -1.0};
  CHECK(shifted_exponential_h2(same, same) == 0.0);
}

TEST_CASE("shifted exponential h2 is symmetric across the shift branches") {
  const ShiftedExponentialLaw p{1.5, 2.0}, q{0.5, -1.0};
  CHECK(shifted_exponential_h2(p, q) ==
        Catch::Approx(shifted_exponential_h2(q, p)).margin(1e-15));

  // Equal shifts: both branches collapse to 1 - 2 sqrt(a1 a2)/(a1 + a2).
  const ShiftedExponentialLaw u{3.0, 1.0}, w{1.0, 1.0};
  CHECK(shifted_exponential_h2(u, w) ==
        Catch::Approx(1.0 - 2.0 * std::sqrt(3.0) / 4.0).margin(1e-14));
}

TEST_CASE("moment matching for the exponential family") {
  SECTION("worked example with vanishing shifts") {
    const auto [p, q] = match_moments_exponential(MomentSpec::from_variances(10, 100, 3, 9));
    CHECK(p.scale == Catch::Approx(10.0));
    CHECK(q.scale == Catch::Approx(3.0));
    CHECK(p.shift == Catch::Approx(0.0).margin(1e-15));
    CHECK(q.shift == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("general spec") {
    const auto [p, q] = match_moments_exponential(MomentSpec::from_variances(20, 30, 10, 20));
    CHECK(p.scale == Catch::Approx(std::sqrt(30.0)));
    CHECK(q.scale == Catch::Approx(std::sqrt(20.0)));
    CHECK(p.shift == Catch::Approx(20.0 - std::sqrt(30.0)));
    CHECK(q.shift == Catch::Approx(10.0 - std::sqrt(20.0)));
    CHECK(mean(p) == Catch::Approx(20.0));
    CHECK(variance(p) == Catch::Approx(30.0));
    CHECK(mean(q) == Catch::Approx(10.0));
    CHECK(variance(q) == Catch::Approx(20.0));
  }
  SECTION("unit scales") {
    const auto [p, q] = match_moments_exponential(MomentSpec{1.0, 1.0, 2.0, 1.0});
    CHECK(p.scale == 1.0);
    CHECK(q.scale == 1.0);
    CHECK(p.shift == 0.0);
    CHECK(q.shift == 1.0);
  }
  SECTION("degenerate sd is rejected") {
    CHECK_THROWS_AS(match_moments_exponential(MomentSpec{1.0, 0.0, 2.0, 1.0}),
                    DegenerateSpec);
  }
}

TEST_CASE("discretized standard gaussian matches the law's moments") {
  const DiscretizedLaw d = discretize(GaussianLaw{0.0, 1.0}, 8.0, 4096);
  const double mean_d = hbound::detail::weighted_mean(d.support, d.probs);
  const double second = hbound::detail::weighted_second_moment(d.support, d.probs);
  CHECK(std::abs(mean_d) < 1e-8);
  CHECK(std::abs(second - mean_d * mean_d - 1.0) < 1e-5);
  CHECK(d.tail_mass <= 1e-6);
  CHECK(d.moment_residual < 1e-5);
}

TEST_CASE("discretized exponential matches the law's mean") {
  const DiscretizedLaw d = discretize(ShiftedExponentialLaw{1.0, 0.0}, 40.0, 8192);
  const double mean_d = hbound::detail::weighted_mean(d.support, d.probs);
  CHECK(std::abs(mean_d - 1.0) < 1e-4);
}

TEST_CASE("discretization refuses to hide heavy tails") {
  CHECK_THROWS_AS(discretize(GaussianLaw{0.0, 1.0}, 2.0, 64), InsufficientCoverage);
  CHECK_THROWS_AS(discretize(ShiftedExponentialLaw{1.0, 0.0}, 5.0, 64),
                  InsufficientCoverage);
  CHECK_THROWS_AS(discretize(GaussianLaw{0.0, 1.0}, 8.0, 1), InvalidParameters);
}

TEST_CASE("identical laws discretize to h2 = 0") {
  const DiscretePair pair =
      discretize_pair(GaussianLaw{1.0, 2.0}, GaussianLaw{1.0, 2.0}, 20.0, 256);
  CHECK(hellinger_sq(pair) == 0.0);
}

TEST_CASE("common-grid discretization approaches the closed form") {
  const GaussianLaw p{10.0, 10.0}, q{3.0, 3.0};
  const double exact = gaussian_h2(p, q);
  const double coarse = hellinger_sq(discretize_pair(p, q, 100.0, 1 << 10));
  const double fine = hellinger_sq(discretize_pair(p, q, 100.0, 1 << 13));
  CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
  CHECK(std::abs(fine - exact) < 1e-3);
}

TEST_CASE("discretized pairs respect the master bound") {
  const GaussianLaw p{10.0, 10.0}, q{3.0, 3.0};
  const DiscretePair pair = discretize_pair(p, q, 100.0, 1 << 12);
  const double h2 = hellinger_sq(pair);
  CHECK(h2 >= hellinger_lower_bound(moments_of(pair)) - 1e-9);
}
