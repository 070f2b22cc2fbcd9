#include <doctest.h>

#include <cmath>
#include <set>

#include "aud/rng.hpp"

using aud::RngStream;

TEST_CASE("same identifiers give identical streams") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.draws() == 1000);
}

TEST_CASE("seed, substream and lane all separate streams") {
  RngStream base(42, 0);
  const auto first = RngStream(42, 0).next_u64();
  CHECK(RngStream(43, 0).next_u64() != first);
  CHECK(RngStream(42, 1).next_u64() != first);
  std::set<std::uint64_t> lanes;
  for (std::uint64_t l = 0; l < 4; ++l) lanes.insert(base.lane(l).next_u64());
  CHECK(lanes.size() == 4);
  CHECK(lanes.count(first) == 0);
}

TEST_CASE("lane draws do not depend on consumption of other lanes") {
  RngStream a(9, 3), b(9, 3);
  auto a_service = a.lane(1);
  auto a_arrival = a.lane(0);
  for (int i = 0; i < 500; ++i) a_arrival.next_u64();
  auto b_service = b.lane(1);
  for (int i = 0; i < 100; ++i) CHECK(a_service.next_u64() == b_service.next_u64());
}

TEST_CASE("uniform_open stays strictly inside (0,1) with the right moments") {
  RngStream r(1, 0);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.005));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("successive draws are uncorrelated") {
  RngStream r(2, 0);
  const int n = 200000;
  double prev = r.uniform_open() - 0.5, acc = 0;
  for (int i = 0; i < n; ++i) {
    const double cur = r.uniform_open() - 0.5;
    acc += prev * cur;
    prev = cur;
  }
  // lag-1 autocorrelation estimate; sd about 1/sqrt(n)
  CHECK(std::abs(acc / n * 12.0) < 5.0 / std::sqrt(n));
}

TEST_CASE("mix64 is a bijection on a sample and mixes low bits") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(aud::mix64(i));
  CHECK(seen.size() == 10000);
  CHECK(aud::mix64(0) != aud::mix64(1));
}
