#pragma once

#include <cstdint>
#include <limits>

namespace hftkin {

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator so the
/// Boost distributions can draw from it directly.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t key = 0) { reseed(key); }

  void reseed(std::uint64_t key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

// Module tags keep the streams of different consumers disjoint.
enum class StreamTag : std::uint64_t {
  micro = 1,
  langevin = 2,
  test = 99,
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Stream identity is (seed, tag, replica): a replica's draws never depend on
/// how many replicas ran before it or on which worker ran it.
Xoshiro256pp make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t replica = 0);

}  // namespace hftkin
