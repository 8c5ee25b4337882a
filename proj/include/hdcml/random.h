#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hdcml {

using Rng = std::mt19937_64;

// Derives an independent stream from a master seed and a path of integer
// keys (component tag, trial index, ...). Distinct paths give distinct
// seed_seq inputs, so streams never share a key.
Rng derive_stream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

// Stable 64-bit tag for a short ASCII name (FNV-1a), used as a path key.
constexpr std::uint64_t stream_tag(const char* name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = name; *p != '\0'; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace hdcml
