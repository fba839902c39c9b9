#include "harmex/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace harmex {

namespace {
constexpr uint32_t kW32A = 0x9E3779B9;
constexpr uint32_t kW32B = 0xBB67AE85;
constexpr uint32_t kM4x32A = 0xD2511F53;
constexpr uint32_t kM4x32B = 0xCD9E8D57;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  lo = static_cast<uint32_t>(p);
  hi = static_cast<uint32_t>(p >> 32);
}
}  // namespace

uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

uint64_t stream_seed(uint64_t master, uint64_t s) {
  return mix64(master ^ mix64(s + 0x9E3779B97F4A7C15ull));
}

std::array<uint32_t, 4> PhiloxRng::block(const std::array<uint32_t, 2>& key,
                                         const std::array<uint32_t, 4>& ctr) {
  std::array<uint32_t, 4> c = ctr;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM4x32A, c[0], lo0, hi0);
    mulhilo(kM4x32B, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    if (round != 9) {
      k[0] += kW32A;
      k[1] += kW32B;
    }
  }
  return c;
}

PhiloxRng::PhiloxRng(uint64_t seed, uint64_t stream) {
  uint64_t k = stream_seed(seed, stream);
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

void PhiloxRng::refill() {
  std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(counter_),
                                 static_cast<uint32_t>(counter_ >> 32), 0, 0};
  ++counter_;
  auto out = block(key_, ctr);
  buf_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
  buf_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
  buf_pos_ = 0;
}

uint64_t PhiloxRng::next_u64() {
  if (buf_pos_ == 2) refill();
  return buf_[buf_pos_++];
}

uint64_t PhiloxRng::uniform_int(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
  // rejection sampling on the largest multiple of `bound` below 2^64
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

double PhiloxRng::uniform01() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are never returned
  uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double PhiloxRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

}  // namespace harmex
