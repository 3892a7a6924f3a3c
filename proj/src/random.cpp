#include "hftkin/random.hpp"

namespace hftkin {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Xoshiro256pp::reseed(std::uint64_t key) {
  std::uint64_t sm = key;
  for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256pp make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t replica) {
  std::uint64_t h = seed;
  std::uint64_t key = splitmix64(h);
  h = key ^ static_cast<std::uint64_t>(tag);
  key = splitmix64(h);
  h = key ^ replica;
  key = splitmix64(h);
  return Xoshiro256pp(key);
}

}  // namespace hftkin
