#pragma once

#include <string>

#include "ddmpc/csv.hpp"
#include "ddmpc/rng.hpp"
#include "ddmpc/types.hpp"

namespace ddmpc {

struct LtiSystem {
  Mat A;  // n x n
  Mat B;  // n x m
  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

enum class NoiseDist { UniformInBall, Boundary, Zero };

NoiseDist noise_dist_from_string(const std::string& s);
std::string to_string(NoiseDist d);

// Instantaneous noise description: every draw w satisfies ||w||_2^2 <= eps.
struct NoiseModel {
  double eps = 0.0;
  NoiseDist dist = NoiseDist::UniformInBall;
};

// Offline input-state data: T+1 states, T inputs, and the declared noise
// bound eps under which the data were collected.
struct DataSet {
  Mat X;  // n x (T+1)
  Mat U;  // m x T
  double eps = 0.0;
  int n() const { return static_cast<int>(X.rows()); }
  int m() const { return static_cast<int>(U.rows()); }
  long T() const { return U.cols(); }
  Trajectory trajectory() const { return Trajectory{X, U}; }
};

// x+ = A x + B u + w.
Vec step(const LtiSystem& sys, const Vec& x, const Vec& u, const Vec& w);

Vec sample_noise(const NoiseModel& model, int dim, Rng& rng);

DataSet generate_dataset(const LtiSystem& sys, const Vec& x0, const Mat& inputs,
                         const NoiseModel& noise, Rng& rng);

}  // namespace ddmpc
