#include "adboot/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace adboot;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  // Random123 reference vectors for philox4x32_10.
  {
    Philox p(0);
    const Philox::Counter out = p({0, 0, 0, 0});
    CHECK(out == Philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  }
  {
    const std::uint64_t key = 0xffffffffull | (0xffffffffull << 32);
    Philox p(key);
    const Philox::Counter out = p({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(out == Philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  }
  {
    const std::uint64_t key = 0xa4093822ull | (0x299f31d0ull << 32);
    Philox p(key);
    const Philox::Counter out = p({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(out == Philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }
}

TEST_CASE("derived seeds differ by stream and index") {
  std::set<std::uint64_t> seen;
  for (auto s : {Stream::Sample, Stream::Bootstrap, Stream::CrossFitBootstrap, Stream::Derived})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(7, s, i));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, Stream::Sample, 3) == derive_seed(7, Stream::Sample, 3));
  CHECK(derive_seed(7, Stream::Sample, 3) != derive_seed(8, Stream::Sample, 3));
}

TEST_CASE("uniform streams") {
  CounterStream s(42, 0);
  double sum = 0.0, sum2 = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) {
    const double u = s.next_open01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / m - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / m));
  CHECK(std::abs(sum2 / m - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal draws have unit variance") {
  CounterStream s(9, 1);
  const int m = 200000;
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = s.next_normal();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  CHECK(std::abs(sum / m) < 4.0 / std::sqrt(m));
  CHECK(std::abs(sum2 / m - 1.0) < 4.0 * std::sqrt(2.0 / m));
  CHECK(std::abs(sum4 / m - 3.0) < 4.0 * std::sqrt(96.0 / m));
}

TEST_CASE("bounded integers are uniform") {
  // chi-square over 7 cells, 70000 draws; 24.3 is the 0.9995 quantile with 6 df
  std::vector<int> counts(7, 0);
  for (std::uint64_t r = 0; r < 10000; ++r)
    for (std::uint64_t slot = 0; slot < 7; ++slot) ++counts[uniform_index(5, r, slot, 7)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 24.3);
  CHECK(uniform_index(5, 3, 2, 7) == uniform_index(5, 3, 2, 7));
  CounterStream a(1, 0), b(1, 0);
  for (int i = 0; i < 10; ++i) CHECK(a.next_below(1000) == b.next_below(1000));
}
