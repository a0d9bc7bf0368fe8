#include <cmath>
#include <vector>

#include "doctest.h"
#include "vibq/envelope.hpp"

using vibq::first_envelope_crossing;
using vibq::upper_envelope;

TEST_CASE("envelope of a damped cosine follows the decay") {
  std::vector<double> t, v;
  for (int i = 0; i <= 4000; ++i) {
    t.push_back(i * 0.005);
    v.push_back(std::exp(-t.back() / 5.0) * std::abs(std::cos(6.0 * t.back())));
  }
  const auto env = upper_envelope<double>(t, v);
  for (std::size_t i = 0; i < t.size(); i += 97) {
    CHECK(env[i] >= v[i] - 1e-12);
    CHECK(env[i] == doctest::Approx(std::exp(-t[i] / 5.0)).epsilon(0.03));
  }
  const auto half = first_envelope_crossing<double>(t, v, 0.5);
  REQUIRE(half.has_value());
  CHECK(*half == doctest::Approx(5.0 * std::log(2.0)).epsilon(0.02));
}

TEST_CASE("no crossing when the curve never drops") {
  const std::vector<double> t{0, 1, 2, 3}, v{1, 0.9, 1, 0.95};
  CHECK_FALSE(first_envelope_crossing<double>(t, v, 0.5).has_value());
}

TEST_CASE("flat zero stretch is its own envelope") {
  const std::vector<double> t{0, 1, 2, 3, 4, 5}, v{1, 0.2, 0, 0, 0, 0};
  const auto cross = first_envelope_crossing<double>(t, v, 0.01);
  REQUIRE(cross.has_value());
  // The first sample that is not below its left neighbour anchors the envelope.
  CHECK(*cross == 3.0);
}

TEST_CASE("size mismatch is rejected") {
  const std::vector<double> t{0, 1}, v{1};
  CHECK_THROWS_AS(upper_envelope<double>(t, v), vibq::ParameterError);
}
