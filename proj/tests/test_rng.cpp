#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "harmex/rng.hpp"

using namespace harmex;

// Reference single-block evaluation written independently of the library
// (unrolled, array-free) for cross-checking.
static void ref_block(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                      uint32_t k0, uint32_t k1, uint32_t out[4]) {
  for (int i = 0; i < 10; ++i) {
    uint64_t p0 = 0xD2511F53ull * c0;
    uint64_t p1 = 0xCD9E8D57ull * c2;
    uint32_t n0 = static_cast<uint32_t>(p1 >> 32) ^ c1 ^ k0;
    uint32_t n1 = static_cast<uint32_t>(p1);
    uint32_t n2 = static_cast<uint32_t>(p0 >> 32) ^ c3 ^ k1;
    uint32_t n3 = static_cast<uint32_t>(p0);
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    if (i != 9) {
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
  }
  out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

TEST_CASE("philox published test vectors") {
  auto r = PhiloxRng::block({0, 0}, {0, 0, 0, 0});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);

  uint32_t F = 0xffffffffu;
  r = PhiloxRng::block({F, F}, {F, F, F, F});
  CHECK(r[0] == 0x408f276du);
  CHECK(r[1] == 0x41c83b0eu);
  CHECK(r[2] == 0xa20bc7c6u);
  CHECK(r[3] == 0x6d5451fdu);

  r = PhiloxRng::block({0xa4093822u, 0x299f31d0u},
                       {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  CHECK(r[0] == 0xd16cfe09u);
  CHECK(r[1] == 0x94fdccebu);
  CHECK(r[2] == 0x5001e420u);
  CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("philox agrees with independent reference over many inputs") {
  uint64_t x = 12345;
  for (int i = 0; i < 500; ++i) {
    x = mix64(x + 1);
    uint32_t c0 = uint32_t(x), c1 = uint32_t(x >> 32);
    uint64_t y = mix64(x);
    uint32_t c2 = uint32_t(y), c3 = uint32_t(y >> 32);
    uint64_t z = mix64(y);
    uint32_t k0 = uint32_t(z), k1 = uint32_t(z >> 32);
    uint32_t want[4];
    ref_block(c0, c1, c2, c3, k0, k1, want);
    auto got = PhiloxRng::block({k0, k1}, {c0, c1, c2, c3});
    REQUIRE(got[0] == want[0]);
    REQUIRE(got[1] == want[1]);
    REQUIRE(got[2] == want[2]);
    REQUIRE(got[3] == want[3]);
  }
}

TEST_CASE("same seed and stream reproduce; different streams diverge") {
  PhiloxRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool all_eq = true, diff_stream = false, diff_seed = false;
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.next_u64();
    all_eq = all_eq && (va == b.next_u64());
    diff_stream = diff_stream || (va != c.next_u64());
    diff_seed = diff_seed || (va != d.next_u64());
  }
  CHECK(all_eq);
  CHECK(diff_stream);
  CHECK(diff_seed);
}

TEST_CASE("stream seeds are distinct across a grid of (master, stream)") {
  std::set<uint64_t> seen;
  for (uint64_t m = 0; m < 50; ++m)
    for (uint64_t s = 0; s < 50; ++s) seen.insert(stream_seed(m, s));
  CHECK(seen.size() == 2500);
}

TEST_CASE("uniform01 stays strictly inside (0,1) with sane moments") {
  PhiloxRng g(2024, 0);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = g.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  // 1/sqrt(12 n) ~ 6.5e-4; allow ~5 sigma
  CHECK(std::abs(mean - 0.5) < 4e-3);
  CHECK(std::abs(var - 1.0 / 12.0) < 4e-3);
}

TEST_CASE("gaussian moments") {
  PhiloxRng g(99, 3);
  const int n = 200000;
  double sum = 0, sum2 = 0, sum4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = g.gaussian();
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum2 / n - 1.0) < 0.03);
  CHECK(std::abs(sum4 / n - 3.0) < 0.15);
}
