#pragma once

#include <cstdint>
#include <random>

namespace scrn {

/// Identifies which consumer a random stream belongs to, so that streams
/// for different oracles never overlap.
enum class StreamId : std::uint64_t {
  gradient = 1,
  hessian = 2,
  iterate_sampling = 3,
  problem_data = 4,
  start_point = 5,
  test = 99,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream keyed by (master_seed, stream id, counter). Two
/// streams built from the same key produce identical sequences, which is
/// how coupled Hessian samples share one realization.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamId id, std::uint64_t counter);
  explicit RngStream(std::uint64_t seed);

  std::mt19937_64& engine() { return engine_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace scrn
