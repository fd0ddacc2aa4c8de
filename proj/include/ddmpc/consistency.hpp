#pragma once

#include <utility>
#include <vector>

#include "ddmpc/lti.hpp"
#include "ddmpc/rng.hpp"
#include "ddmpc/types.hpp"

namespace ddmpc {

// One quadratic block per data sample: Pi_i = D_i diag(eps*I_n, -1) D_i^T with
// D_i = [[I, x_{i+1}], [0, -x_i], [0, -u_i]], size (2n+m) x (2n+m). A pair
// (A, B) is consistent with sample i iff [I A B] Pi_i [I A B]^T >= 0.
struct PiBlocks {
  std::vector<Mat> blocks;
  int n = 0, m = 0;
  long T() const { return static_cast<long>(blocks.size()); }
  int dim() const { return 2 * n + m; }
};

enum class MultiplierMode { PerSample, Common };

struct Multipliers {
  Vec tau;
  MultiplierMode mode = MultiplierMode::PerSample;
};

PiBlocks build_pi_blocks(const DataSet& data);

// Sum_i tau_i * Pi_i. Throws on negative multipliers or length mismatch.
Mat assemble_pi(const PiBlocks& blocks, const Multipliers& mult);

// Definitional membership in C = intersection of per-sample residual sets:
// for every i, ||x_{i+1} - A x_i - B u_i||^2 <= eps (+1e-12 absolute slack).
bool contains(const DataSet& data, const Mat& A, const Mat& B);

// Largest per-sample residual excess ||r_i||^2 - eps (negative inside C).
double worst_residual_excess(const DataSet& data, const Mat& A, const Mat& B);

// QMI test [I A B] Pi(tau) [I A B]^T >= -1e-10 * (1+norm) by eigenvalue.
bool qmi_membership(const PiBlocks& blocks, const Multipliers& mult, const Mat& A, const Mat& B);

// Least-squares estimate of (A, B) from the data.
std::pair<Mat, Mat> least_squares_estimate(const DataSet& data);

struct ConsistentSamples {
  std::vector<std::pair<Mat, Mat>> systems;
  long proposals = 0;
  bool undersampled = false;
};

// Rejection sampling around the least-squares estimate with adaptive proposal
// scale; every returned pair passes contains(). Includes the least-squares
// estimate itself when consistent. Deterministic given rng seed; the parallel
// and serial paths produce identical output.
ConsistentSamples sample_consistent(const DataSet& data, long count, Rng& rng,
                                    bool parallel = true);

}  // namespace ddmpc
