#pragma once

#include "plap/types.hpp"

#include <cstdint>
#include <random>

namespace plap {

/// Seedable 64-bit random source.
///
/// Stream-split rule: `Rng::substream(seed, k)` seeds an independent generator
/// from splitmix64(seed) and splitmix64(k + 1). Every estimation call, grid node
/// and anchor owns one substream, so results do not depend on evaluation order
/// or worker count.
class Rng {
public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  Point normal_vector(int dim);

  engine_type& engine() { return engine_; }

  static std::uint64_t splitmix64(std::uint64_t x);

private:
  static std::uint64_t mix(std::uint64_t seed) { return splitmix64(seed); }

  engine_type engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace plap
