#include "hdcml/random.h"

#include <vector>

namespace hdcml {

Rng derive_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1) + 1);
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(master_seed);
  // Length prefix keeps {a, b} and {a, b, 0} apart.
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (std::uint64_t key : path) push(key);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace hdcml
