#pragma once

#include <cstdint>
#include <random>

#include "ddmpc/types.hpp"

namespace ddmpc {

// Deterministic random source. All randomness in the artifact flows through
// this class so that a (seed, stream) pair fully reproduces any experiment.
// derive() yields statistically independent child streams whose output does
// not depend on evaluation order, which keeps parallel sampling deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t raw() { return eng_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (deterministic; caches the spare draw).
  double normal();
  Vec normal_vec(int dim);

  // Uniform on the closed ball { w : ||w||_2^2 <= sq_radius }.
  Vec ball(int dim, double sq_radius);
  // Uniform on the sphere { w : ||w||_2^2 = sq_radius }.
  Vec sphere(int dim, double sq_radius);

  // Independent child stream; pure function of (seed, stream_id).
  Rng derive(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ddmpc
