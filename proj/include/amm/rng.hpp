#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

// Counter-based random numbers (Philox4x32-10).  Every variate is a pure
// function of (seed, path, step, stream), so paths can be generated on any
// number of threads, in any order, and still come out identical.
namespace amm::rng {

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    uint64_t p0 = uint64_t(kPhiloxM0) * ctr[0];
    uint64_t p1 = uint64_t(kPhiloxM1) * ctr[2];
    ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
           uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// Logical sub-streams of one seeded run.  Keeping them on separate counters
// means e.g. adding more price draws never shifts the trade-order coin flips.
enum Stream : uint32_t {
  kPriceStream = 0,
  kOrderStream = 1,
};

inline std::array<uint32_t, 4> block(uint64_t seed, uint64_t path,
                                     uint32_t step, uint32_t stream) {
  return philox4x32({uint32_t(path), uint32_t(path >> 32), step, stream},
                    {uint32_t(seed), uint32_t(seed >> 32)});
}

// 53-bit uniform on [0,1) from two 32-bit words.
inline double u01(uint32_t hi, uint32_t lo) {
  uint64_t bits = (uint64_t(hi) << 32) | lo;
  return double(bits >> 11) * 0x1.0p-53;
}

// Uniform on (0,1]; safe to feed through log().
inline double u01_open(uint32_t hi, uint32_t lo) {
  uint64_t bits = (uint64_t(hi) << 32) | lo;
  return double((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one block yields one variate.
inline double normal(uint64_t seed, uint64_t path, uint32_t step,
                     uint32_t stream) {
  auto w = block(seed, path, step, stream);
  double u1 = u01_open(w[0], w[1]);
  double u2 = u01(w[2], w[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Fair coin used for intra-step ordering.
inline bool coin(uint64_t seed, uint64_t path, uint32_t step) {
  return block(seed, path, step, kOrderStream)[0] & 1u;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic sub-seed from a base seed and a coordinate tuple, used to
// give every sweep cell / calibration point its own independent stream.
inline uint64_t mix_seed(uint64_t seed, std::initializer_list<uint64_t> coords) {
  uint64_t h = splitmix64(seed);
  for (uint64_t c : coords) h = splitmix64(h ^ c);
  return h;
}

}  // namespace amm::rng
