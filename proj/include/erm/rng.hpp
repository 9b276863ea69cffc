#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace erm {

enum class StreamPurpose : std::uint64_t {
  init = 1,
  grad = 2,
  select = 3,
  eval = 4,
  mmc = 5,
  mc_lp = 6,
  field = 7,
  probe = 8,
  sweep = 9,
  data = 10,
};

struct StreamTag {
  StreamPurpose purpose;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
};

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it can feed
/// <random> distributions, but the project only uses the uniform helpers below
/// because those are bit-identical across standard libraries.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::array<std::uint64_t, 4> state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    ++draws_;
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1} (n >= 1), Lemire's multiply-shift without rejection.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  std::uint64_t draws() const { return draws_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_;
  std::uint64_t draws_ = 0;
};

// splitmix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for (master_seed, purpose, k, n).
///
/// The four words seed, purpose, k, n are absorbed one at a time as
/// h <- mix64(h ^ (word + 0x9e3779b97f4a7c15 * (i + 1))), starting from
/// h = mix64(seed). The xoshiro state is then filled by running splitmix64
/// from h. Pure integer arithmetic, so streams are bit-identical on every
/// platform.
Stream derive_stream(std::uint64_t master_seed, StreamTag tag);

}  // namespace erm
