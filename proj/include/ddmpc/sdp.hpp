#pragma once

#include <string>
#include <vector>

#include "ddmpc/types.hpp"

namespace ddmpc::sdp {

// Solves linear-matrix-inequality problems in the form
//     minimize    c'y
//     subject to  F(y) = F0 + sum_k y_k F_k  is positive semidefinite,
// where all matrices share one block-diagonal structure (dense blocks and
// diagonal blocks). Solved by a primal-dual interior-point method with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector step.

enum class BlockKind { Dense, Diag };

struct BlockSpec {
  BlockKind kind = BlockKind::Dense;
  int size = 0;
};

// Symmetric block-diagonal matrix. Dense blocks store full s x s matrices,
// diagonal blocks only their diagonal.
class BlockMat {
 public:
  BlockMat() = default;
  explicit BlockMat(const std::vector<BlockSpec>& specs);

  int num_blocks() const { return static_cast<int>(specs_.size()); }
  const std::vector<BlockSpec>& specs() const { return specs_; }
  Mat& dense(int b) { return dense_[b]; }
  const Mat& dense(int b) const { return dense_[b]; }
  Vec& diag(int b) { return diag_[b]; }
  const Vec& diag(int b) const { return diag_[b]; }

  void set_zero();
  void set_identity(double scale = 1.0);
  double dot(const BlockMat& other) const;
  double norm() const;
  double trace() const;
  void axpy(double a, const BlockMat& x);  // this += a * x
  void scale(double a);
  double min_eigenvalue() const;

 private:
  std::vector<BlockSpec> specs_;
  std::vector<Mat> dense_;
  std::vector<Vec> diag_;
};

// One constraint matrix F_k, stored sparsely over the blocks it touches.
struct ConstraintMat {
  struct DenseTerm {
    int block;
    Mat value;
  };
  struct DiagTerm {
    int block;
    int index;
    double value;
  };
  std::vector<DenseTerm> dense_terms;
  std::vector<DiagTerm> diag_terms;
  void add_dense(int block, Mat value) { dense_terms.push_back({block, std::move(value)}); }
  void add_diag(int block, int index, double value) { diag_terms.push_back({block, index, value}); }
  double frob_norm() const;
};

struct Problem {
  std::vector<BlockSpec> blocks;
  BlockMat F0;
  std::vector<ConstraintMat> Fk;
  Vec c;
  int num_vars() const { return static_cast<int>(Fk.size()); }
  // F0 + sum_k y_k F_k
  BlockMat eval(const Vec& y) const;
};

enum class Status { Optimal, Infeasible, MaxIter, Numerical };

std::string to_string(Status s);

struct Options {
  double tol_gap = 1e-10;     // relative complementarity gap
  double tol_feas = 1e-10;    // relative primal/dual residuals
  int max_iter = 100;
  double step_frac = 0.98;    // fraction-to-boundary
  bool scale_vars = true;     // normalize columns ||F_k||_F to 1
  bool parallel_schur = true; // OpenMP over Schur-complement rows
  const Vec* warm_y = nullptr; // optional warm start for y
};

struct Solution {
  Status status = Status::Numerical;
  Vec y;
  double obj = 0.0;       // c'y
  double gap = 0.0;       // <X,Z> (absolute)
  double rel_gap = 0.0;
  double primal_res = 0.0;  // || c_k - <F_k,X> || / (1+||c||)
  double dual_res = 0.0;    // || F(y) - Z ||_F / (1+||F0||_F)
  int iterations = 0;
  std::string detail;
};

Solution solve(const Problem& prob, const Options& opts = {});

}  // namespace ddmpc::sdp
