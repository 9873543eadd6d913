#include "lassonse/random.hpp"

#include <vector>

namespace lassonse {

std::mt19937_64 substream(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 2));
  // domain tag + key count keep (seed) and (seed, 0) distinct
  words.push_back(0x4c4e5345u);
  words.push_back(static_cast<std::uint32_t>(keys.size()));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace lassonse
