#include <catch2/catch_amalgamated.hpp>

#include "hbound/json_io.hpp"

using namespace hbound;

TEST_CASE("moment spec json round-trip is lossless") {
  const MomentSpec spec{10.0, std::sqrt(30.0), -3.0, 0.1234567890123456};
  const json j = spec;
  CHECK(j.at("mean_p") == 10.0);
  const std::string text = j.dump();
  const MomentSpec back = json::parse(text).get<MomentSpec>();
  CHECK(back.mean_p == spec.mean_p);
  CHECK(back.sigma_p == spec.sigma_p);
  CHECK(back.mean_q == spec.mean_q);
  CHECK(back.sigma_q == spec.sigma_q);
}

TEST_CASE("discrete pair json uses the documented field names") {
  const DiscretePair pair({-1.0, 2.0}, {0.25, 0.75}, {0.5, 0.5});
  const json j = pair;
  REQUIRE(j.contains("support"));
  REQUIRE(j.contains("p"));
  REQUIRE(j.contains("q"));
  const DiscretePair back = discrete_pair_from_json(json::parse(j.dump()));
  REQUIRE(back.size() == pair.size());
  for (std::size_t i = 0; i < pair.size(); ++i) {
    CHECK(back.support()[i] == pair.support()[i]);
    CHECK(back.p()[i] == pair.p()[i]);
    CHECK(back.q()[i] == pair.q()[i]);
  }
}

TEST_CASE("bound report serializes optional parts as null") {
  const json with = bound_report(MomentSpec::from_variances(10, 100, 3, 9));
  CHECK(with.at("attainer").is_object());
  CHECK(with.at("beta_min").is_number());

  const json without = bound_report(MomentSpec{1.0, 1.0, 1.0, 2.0});
  CHECK(without.at("attainer").is_null());
  CHECK(without.at("beta_min").is_null());
  CHECK(without.at("hellinger_lb") == 0.0);
}

TEST_CASE("record kinds serialize as strings") {
  VerificationRecord record{DiscretePair({0.0}, {1.0}, {1.0}), 0.0, 0.0, 0.0, 0.0,
                            RecordKind::optimized};
  const json j = record;
  CHECK(j.at("kind") == "optimized");
  CHECK(j.at("pair").at("support").size() == 1);
}

TEST_CASE("verification config round-trips through json") {
  VerificationConfig config;
  config.n_points = 7;
  config.radius = 123.5;
  config.seed = 99;
  const json j = config;
  const VerificationConfig back = json::parse(j.dump()).get<VerificationConfig>();
  CHECK(back.n_points == 7);
  CHECK(back.radius == 123.5);
  CHECK(back.seed == 99);
  CHECK(back.tol_moments == config.tol_moments);
}

TEST_CASE("doubles survive a dump/parse cycle exactly") {
  // nlohmann emits shortest round-trip representations; recomputing any
  // serialized value from the parsed text must reproduce it bit for bit.
  const double values[] = {0.1195289000778247, 1.0 / 3.0, 1e-300, 6.02e23,
                           0.6360687635226261};
  for (double v : values) {
    const json j = v;
    CHECK(json::parse(j.dump()).get<double>() == v);
  }
}
