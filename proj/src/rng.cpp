#include "erm/rng.hpp"

namespace erm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

Stream derive_stream(std::uint64_t master_seed, StreamTag tag) {
  const std::array<std::uint64_t, 3> words = {static_cast<std::uint64_t>(tag.purpose), tag.k, tag.n};
  std::uint64_t h = mix64(master_seed);
  for (std::size_t i = 0; i < words.size(); ++i) h = mix64(h ^ (words[i] + kGolden * (i + 1)));

  std::array<std::uint64_t, 4> state{};
  for (auto& s : state) {
    h += kGolden;
    s = mix64(h);
  }
  if ((state[0] | state[1] | state[2] | state[3]) == 0) state[0] = kGolden;
  return Stream(state);
}

}  // namespace erm
