#include "ddmpc/consistency.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <utility>

#include "ddmpc/sdp.hpp"

#ifdef DDMPC_HAVE_OPENMP
#include <omp.h>
#endif

namespace ddmpc {

PiBlocks build_pi_blocks(const DataSet& data) {
  const int n = data.n(), m = data.m();
  const long T = data.T();
  require_dims(data.X.cols() == T + 1, "dataset must hold T+1 states");
  PiBlocks pb;
  pb.n = n;
  pb.m = m;
  pb.blocks.reserve(T);
  Mat mid = Mat::Zero(n + 1, n + 1);
  mid.topLeftCorner(n, n) = data.eps * Mat::Identity(n, n);
  mid(n, n) = -1.0;
  for (long i = 0; i < T; ++i) {
    Mat D = Mat::Zero(2 * n + m, n + 1);
    D.topLeftCorner(n, n) = Mat::Identity(n, n);
    D.block(0, n, n, 1) = data.X.col(i + 1);
    D.block(n, n, n, 1) = -data.X.col(i);
    D.block(2 * n, n, m, 1) = -data.U.col(i);
    pb.blocks.push_back(symmetrized(D * mid * D.transpose()));
  }
  return pb;
}

Mat assemble_pi(const PiBlocks& blocks, const Multipliers& mult) {
  require(mult.tau.size() == blocks.T(),
          "multiplier count " + std::to_string(mult.tau.size()) + " != T = " +
              std::to_string(blocks.T()));
  if (mult.mode == MultiplierMode::Common) {
    for (long i = 1; i < mult.tau.size(); ++i)
      require(mult.tau(i) == mult.tau(0), "common mode requires equal multipliers");
  }
  Mat pi = Mat::Zero(blocks.dim(), blocks.dim());
  for (long i = 0; i < blocks.T(); ++i) {
    require(mult.tau(i) >= 0.0, "negative multiplier tau[" + std::to_string(i) + "]");
    pi += mult.tau(i) * blocks.blocks[static_cast<size_t>(i)];
  }
  return pi;
}

double worst_residual_excess(const DataSet& data, const Mat& A, const Mat& B) {
  require_dims(A.rows() == data.n() && A.cols() == data.n(), "A shape mismatch");
  require_dims(B.rows() == data.n() && B.cols() == data.m(), "B shape mismatch");
  const long T = data.T();
  double worst = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < T; ++i) {
    const Vec r = data.X.col(i + 1) - A * data.X.col(i) - B * data.U.col(i);
    worst = std::max(worst, r.squaredNorm() - data.eps);
  }
  return worst;
}

bool contains(const DataSet& data, const Mat& A, const Mat& B) {
  return worst_residual_excess(data, A, B) <= 1e-12;
}

bool qmi_membership(const PiBlocks& blocks, const Multipliers& mult, const Mat& A,
                    const Mat& B) {
  const int n = blocks.n, m = blocks.m;
  require_dims(A.rows() == n && A.cols() == n, "A shape mismatch");
  require_dims(B.rows() == n && B.cols() == m, "B shape mismatch");
  Mat iab(n, 2 * n + m);
  iab << Mat::Identity(n, n), A, B;
  const Mat q = symmetrized(iab * assemble_pi(blocks, mult) * iab.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-10 * (1.0 + q.norm());
}

std::pair<Mat, Mat> least_squares_estimate(const DataSet& data) {
  const int n = data.n(), m = data.m();
  const long T = data.T();
  Mat Z(n + m, T);
  Z.topRows(n) = data.X.leftCols(T);
  Z.bottomRows(m) = data.U;
  const Mat Xp = data.X.rightCols(T);
  // Theta = Xp Z^+ via the normal equations with a rank-safe LDLT solve.
  const Mat G = Z * Z.transpose();
  const Mat theta = G.ldlt().solve(Z * Xp.transpose()).transpose();
  return {theta.leftCols(n), theta.rightCols(m)};
}

namespace {

// Recenter onto the point with the smallest worst-case residual: solve
//   minimize s  subject to  [[s, r_i(Theta)'],[r_i(Theta), I]] >= 0  for all i
// (Schur: ||r_i||^2 <= s) with the interior-point solver, residuals scaled by
// 1/sqrt(eps) for conditioning, then polish away solver roundoff with a few
// cyclic projections onto the violated residual cylinders. Used when the
// least-squares center itself violates a sample, which is common for long
// noisy records; the min-max point is strictly inside whenever the
// consistency set has interior.
Mat feasible_center(const DataSet& data, Mat theta) {
  const long T = data.T();
  const int n = data.n(), m = data.m();
  const int nv = n * (n + m);
  const double rs = 1.0 / std::sqrt(data.eps);

  sdp::Problem prob;
  prob.blocks.assign(static_cast<size_t>(T), sdp::BlockSpec{sdp::BlockKind::Dense, n + 1});
  prob.F0 = sdp::BlockMat(prob.blocks);
  prob.Fk.resize(static_cast<size_t>(nv) + 1);
  for (long i = 0; i < T; ++i) {
    Mat f0 = Mat::Zero(n + 1, n + 1);
    f0.block(1, 0, n, 1) = rs * data.X.col(i + 1);
    f0.block(0, 1, 1, n) = f0.block(1, 0, n, 1).transpose();
    f0.block(1, 1, n, n).setIdentity();
    prob.F0.dense(static_cast<int>(i)) = f0;
    Vec z(n + m);
    z.head(n) = data.X.col(i);
    z.tail(m) = data.U.col(i);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n + m; ++q) {
        Mat fk = Mat::Zero(n + 1, n + 1);
        fk(0, 1 + p) = fk(1 + p, 0) = -rs * z(q);
        prob.Fk[static_cast<size_t>(p * (n + m) + q)].add_dense(static_cast<int>(i),
                                                                std::move(fk));
      }
    Mat fs = Mat::Zero(n + 1, n + 1);
    fs(0, 0) = 1.0;
    prob.Fk[static_cast<size_t>(nv)].add_dense(static_cast<int>(i), std::move(fs));
  }
  prob.c = Vec::Zero(nv + 1);
  prob.c(nv) = 1.0;

  sdp::Options opts;
  opts.tol_gap = 1e-11;
  opts.tol_feas = 1e-10;
  opts.parallel_schur = false;  // tiny Schur system; keep one deterministic path
  const sdp::Solution sol = sdp::solve(prob, opts);
  if (sol.y.size() == nv + 1 && sol.y.allFinite()) {
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n + m; ++q) theta(p, q) = sol.y(p * (n + m) + q);
  }

  const double target = data.eps * (1.0 - 1e-9);
  for (int pass = 0; pass < 50; ++pass) {
    double worst = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < T; ++i) {
      Vec z(n + m);
      z.head(n) = data.X.col(i);
      z.tail(m) = data.U.col(i);
      const Vec r = data.X.col(i + 1) - theta * z;
      const double rn2 = r.squaredNorm();
      worst = std::max(worst, rn2 - data.eps);
      if (rn2 > target) {
        const double shrink = 1.0 - std::sqrt(target) / std::sqrt(rn2);
        theta += shrink * r * (z.transpose() / z.squaredNorm());
      }
    }
    if (worst <= 0.0) break;
  }
  return theta;
}

}  // namespace

ConsistentSamples sample_consistent(const DataSet& data, long count, Rng& rng,
                                    bool parallel) {
  require(count >= 1, "sample count must be >= 1");
  const int n = data.n(), m = data.m();
  const long T = data.T();

  ConsistentSamples out;
  auto [Als, Bls] = least_squares_estimate(data);
  if (data.eps <= 0.0) {
    // Singleton set: every nonzero perturbation is rejected, so only the
    // least-squares point can be returned.
    if (contains(data, Als, Bls)) out.systems.emplace_back(Als, Bls);
    out.undersampled = out.systems.empty();
    return out;
  }

  Mat Z(n + m, T);
  Z.topRows(n) = data.X.leftCols(T);
  Z.bottomRows(m) = data.U;
  // Shape proposals by the data Gram matrix so that all directions of the
  // consistency set are reachable (tight directions get small steps).
  Eigen::LLT<Mat> llt((Z * Z.transpose() / static_cast<double>(T)).eval());
  require(llt.info() == Eigen::Success, "data Gram matrix is singular; cannot sample");
  const Mat Linv = llt.matrixL().solve(Mat::Identity(n + m, n + m));

  Mat theta_ls(n, n + m);
  theta_ls << Als, Bls;
  if (!contains(data, Als, Bls)) theta_ls = feasible_center(data, theta_ls);
  if (contains(data, theta_ls.leftCols(n), theta_ls.rightCols(m)))
    out.systems.emplace_back(theta_ls.leftCols(n), theta_ls.rightCols(m));

  const long batch = 256;
  const long max_proposals = std::max<long>(20000, 400 * count);
  double scale = std::sqrt(data.eps);
  long proposals = 0;

  std::vector<Mat> cand(static_cast<size_t>(batch));
  std::vector<char> ok(static_cast<size_t>(batch));
  while (static_cast<long>(out.systems.size()) < count && proposals < max_proposals) {
    const long todo = batch;
    auto evaluate = [&](long j) {
      Rng child = rng.derive(static_cast<std::uint64_t>(proposals + j));
      // per-proposal radius jitter keeps the accepted set spread over scales
      const double jitter = std::exp2(child.uniform(-2.0, 1.0));
      Mat G(n, n + m);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n + m; ++c) G(r, c) = child.normal();
      const Mat theta = theta_ls + (scale * jitter) * G * Linv;
      double worst = -1.0;
      for (long i = 0; i < T && worst <= 1e-12; ++i) {
        const Vec r = data.X.col(i + 1) - theta * Z.col(i);
        worst = std::max(worst, r.squaredNorm() - data.eps);
      }
      cand[static_cast<size_t>(j)] = theta;
      ok[static_cast<size_t>(j)] = worst <= 1e-12 ? 1 : 0;
    };
    if (parallel) {
#ifdef DDMPC_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long j = 0; j < todo; ++j) evaluate(j);
    } else {
      for (long j = 0; j < todo; ++j) evaluate(j);
    }
    long accepted = 0;
    for (long j = 0; j < todo; ++j) {
      if (!ok[static_cast<size_t>(j)]) continue;
      ++accepted;
      if (static_cast<long>(out.systems.size()) < count) {
        const Mat& th = cand[static_cast<size_t>(j)];
        out.systems.emplace_back(th.leftCols(n), th.rightCols(m));
      }
    }
    proposals += todo;
    // Deterministic scale adaptation toward a 10-50% acceptance band.
    const double rate = static_cast<double>(accepted) / static_cast<double>(todo);
    if (rate < 0.10)
      scale *= 0.5;
    else if (rate > 0.50)
      scale *= 1.8;
  }
  out.proposals = proposals;
  out.undersampled = static_cast<long>(out.systems.size()) < count;
  return out;
}

}  // namespace ddmpc
