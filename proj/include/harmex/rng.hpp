#pragma once
#include <array>
#include <cstdint>

namespace harmex {

// splitmix64 finalizer; used to whiten seeds and derive per-stream keys.
uint64_t mix64(uint64_t x);

// Key for Monte Carlo stream s under a master seed.  Streams are independent
// of scheduling: sample s can be drawn on any thread, in any order, and the
// sequence depends only on (master, s).
uint64_t stream_seed(uint64_t master, uint64_t s);

// Philox4x32-10 counter-based generator.  The (key, counter) pair maps to four
// 32-bit output words through ten rounds; successive draws bump the counter.
class PhiloxRng {
 public:
  explicit PhiloxRng(uint64_t seed, uint64_t stream = 0);

  // One keyed block: pure function of (key, counter), no state.
  static std::array<uint32_t, 4> block(const std::array<uint32_t, 2>& key,
                                       const std::array<uint32_t, 4>& ctr);

  uint64_t next_u64();
  uint64_t uniform_int(uint64_t bound);  // unbiased draw from {0, ..., bound-1}
  double uniform01();  // strictly inside (0,1)
  double gaussian();   // standard normal (Box-Muller)

 private:
  void refill();

  std::array<uint32_t, 2> key_;
  uint64_t counter_ = 0;
  std::array<uint64_t, 2> buf_{};
  int buf_pos_ = 2;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace harmex
