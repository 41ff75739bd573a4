#include "scrn/rng.hpp"

namespace scrn {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, StreamId id, std::uint64_t counter)
    : engine_(mix64(mix64(mix64(master_seed) ^ static_cast<std::uint64_t>(id)) ^ counter)) {}

RngStream::RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

}  // namespace scrn
