#pragma once

#include <cstdint>
#include <random>

namespace mixl {

// Deterministic stream of random variates. A (seed, stream) pair fully pins
// the sequence, independent of platform and of how other streams are used.
// Streams are the unit of reproducibility: the sampler gives every individual
// its own stream so chain output does not depend on worker scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform01();      // [0, 1)
  double uniform_pos();    // (0, 1], safe for log()
  double normal();         // standard normal, Box-Muller with cached pair
  double gamma(double shape);  // unit scale, shape > 0
  double chi_squared(double dof);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// splitmix64 step; used for seed/stream mixing and derived seeds.
std::uint64_t mix64(std::uint64_t x);

// Combine a master seed with labels (level index, role tags...) into a new
// seed. Order matters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace mixl
