#include "ddmpc/synthesis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>

namespace ddmpc {

Mat factor_weight(const Mat& W) {
  require(W.rows() == W.cols(), "factor_weight: matrix must be square");
  require(W.isApprox(W.transpose(), 1e-12), "factor_weight: matrix must be symmetric");
  Eigen::LLT<Mat> llt(W);
  require(llt.info() == Eigen::Success, "factor_weight: matrix must be positive definite");
  return Mat(llt.matrixU());
}

CostWeights CostWeights::make(const Mat& Q, const Mat& R) {
  CostWeights w;
  w.Q = symmetrized(Q);
  w.R = symmetrized(R);
  w.M_Q = factor_weight(w.Q);
  w.M_R = factor_weight(w.R);
  return w;
}

std::string to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::Optimal: return "optimal";
    case SynthStatus::Infeasible: return "infeasible";
    case SynthStatus::NumericalFailure: return "numerical-failure";
  }
  return "numerical-failure";
}

double strictness_margin(const Vec& x_t) { return 1e-8 * (1.0 + x_t.squaredNorm()); }

Mat build_lmi_initial(const Vec& x_t, const Mat& H) {
  const int n = static_cast<int>(x_t.size());
  Mat init(n + 1, n + 1);
  init(0, 0) = 1.0;
  init.block(1, 0, n, 1) = x_t;
  init.block(0, 1, 1, n) = x_t.transpose();
  init.block(1, 1, n, n) = H;
  return init;
}

Mat build_lmi_decrease(const Mat& H, const Mat& L, double gamma, const Mat& pi,
                       const CostWeights& weights) {
  const int n = weights.n();
  const int m = weights.m();
  const int q = 2 * n + m;     // QMI part
  const int r0 = 3 * n + m;    // cost part
  const int s = 4 * n + 2 * m;
  Mat M = Mat::Zero(s, s);
  if (pi.size() > 0) M.topLeftCorner(q, q) = pi;
  M.block(0, 0, n, n) -= H;
  M.block(n, q, n, n) = H;
  M.block(q, n, n, n) = H.transpose();
  M.block(2 * n, q, m, n) = L;
  M.block(q, 2 * n, n, m) = L.transpose();
  M.block(q, q, n, n) -= H;
  const Mat phi_u = weights.M_R * L;
  const Mat phi_x = weights.M_Q * H;
  M.block(r0, q, m, n) = phi_u;
  M.block(q, r0, n, m) = phi_u.transpose();
  M.block(r0 + m, q, n, n) = phi_x;
  M.block(q, r0 + m, n, n) = phi_x.transpose();
  M.block(r0, r0, n + m, n + m) -= gamma * Mat::Identity(n + m, n + m);
  return M;
}

Mat build_lmi_input(const Mat& H, const Mat& L, const Mat& S_u) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(L.rows());
  Mat in(n + m, n + m);
  in.topLeftCorner(n, n) = H;
  const Mat scaled = factor_weight(S_u) * L;
  in.block(n, 0, m, n) = scaled;
  in.block(0, n, n, m) = scaled.transpose();
  in.block(n, n, m, m).setIdentity();
  return in;
}

Mat build_lmi_state(const Mat& H, const Mat& S_x) {
  const int n = static_cast<int>(H.rows());
  Mat st(2 * n, 2 * n);
  st.topLeftCorner(n, n) = S_x;
  st.block(0, n, n, n).setIdentity();
  st.block(n, 0, n, n).setIdentity();
  st.block(n, n, n, n) = H;
  return st;
}

namespace {

// Symmetric basis matrix for the vech(H) parametrization: unit diagonal entry
// or 1 in both mirrored off-diagonal slots, so H(i,j) equals the variable.
Mat sym_basis(int n, int i, int j) {
  Mat E = Mat::Zero(n, n);
  E(i, j) = 1.0;
  E(j, i) = 1.0;
  return E;
}

struct VarLayout {
  int n = 0, m = 0, ntau = 0;
  int idx_gamma() const { return 0; }
  int idx_h() const { return 1; }
  int nh() const { return n * (n + 1) / 2; }
  int idx_l() const { return 1 + nh(); }
  int nl() const { return m * n; }
  int idx_tau() const { return idx_l() + nl(); }
  int total() const { return idx_tau() + ntau; }
};

Mat unpack_h(const Vec& y, const VarLayout& lay) {
  Mat H = Mat::Zero(lay.n, lay.n);
  int k = lay.idx_h();
  for (int j = 0; j < lay.n; ++j)
    for (int i = j; i < lay.n; ++i) {
      H(i, j) = y[k];
      H(j, i) = y[k];
      ++k;
    }
  return H;
}

Mat unpack_l(const Vec& y, const VarLayout& lay) {
  Mat L = Mat::Zero(lay.m, lay.n);
  int k = lay.idx_l();
  for (int j = 0; j < lay.n; ++j)
    for (int i = 0; i < lay.m; ++i) L(i, j) = y[k++];
  return L;
}

Vec pack_vars(const Mat& H, const Mat& L, double gamma, const Vec& tau, const VarLayout& lay) {
  Vec y = Vec::Zero(lay.total());
  y[lay.idx_gamma()] = gamma;
  int k = lay.idx_h();
  for (int j = 0; j < lay.n; ++j)
    for (int i = j; i < lay.n; ++i) y[k++] = H(i, j);
  for (int j = 0; j < lay.n; ++j)
    for (int i = 0; i < lay.m; ++i) y[k++] = L(i, j);
  y.segment(lay.idx_tau(), lay.ntau) = tau;
  return y;
}

bool state_constraint_active(const Mat& S_x) { return S_x.size() > 0 && S_x.norm() > 0.0; }

SynthesisResult origin_result(const Vec& x_t, const PiBlocks& blocks,
                              const SynthesisOptions& opts) {
  if (opts.warm_from != nullptr && opts.warm_from->status == SynthStatus::Optimal) {
    SynthesisResult r = *opts.warm_from;
    r.delta = strictness_margin(x_t);
    r.solve_time = 0.0;
    r.iterations = 0;
    r.detail = "origin short-circuit (previous gain reused)";
    return r;
  }
  const int n = blocks.n, m = blocks.m;
  SynthesisResult r;
  r.status = SynthStatus::Optimal;
  r.gamma = 0.0;
  r.H = Mat::Identity(n, n);
  r.L = Mat::Zero(m, n);
  r.tau.mode = opts.mode;
  r.tau.tau = Vec::Zero(opts.mode == MultiplierMode::PerSample ? blocks.T() : 1);
  r.F = Mat::Zero(m, n);
  r.P = Mat::Zero(n, n);
  r.delta = strictness_margin(x_t);
  r.detail = "origin short-circuit (zero-gain certificate)";
  return r;
}

}  // namespace

SynthesisResult synthesize(const Vec& x_t, const PiBlocks& blocks, const CostWeights& weights,
                           const ConstraintSets& cons, const SynthesisOptions& opts) {
  const int n = blocks.n;
  const int m = blocks.m;
  require(static_cast<int>(x_t.size()) == n, "synthesize: state dimension mismatch");
  require(weights.n() == n && weights.m() == m, "synthesize: weight dimension mismatch");
  if (opts.include_constraints) {
    require(static_cast<int>(cons.S_u.rows()) == m && static_cast<int>(cons.S_u.cols()) == m,
            "synthesize: S_u dimension mismatch");
    if (state_constraint_active(cons.S_x))
      require(static_cast<int>(cons.S_x.rows()) == n && static_cast<int>(cons.S_x.cols()) == n,
              "synthesize: S_x dimension mismatch");
  }

  if (x_t.norm() <= opts.origin_threshold) return origin_result(x_t, blocks, opts);

  const auto t_start = std::chrono::steady_clock::now();
  const double delta = strictness_margin(x_t);

  // Multiplier blocks, optionally normalized to unit Frobenius norm. The
  // solver variable is tau_i * scale_i; the reported tau undoes the scaling.
  std::vector<Mat> pis;
  std::vector<double> pi_scale;
  if (opts.mode == MultiplierMode::PerSample) {
    pis = blocks.blocks;
  } else {
    Mat sum = Mat::Zero(blocks.dim(), blocks.dim());
    for (const Mat& b : blocks.blocks) sum += b;
    pis.push_back(std::move(sum));
  }
  for (Mat& b : pis) {
    double s = 1.0;
    if (opts.normalize_pi) {
      const double f = b.norm();
      if (f > 1e-300) {
        s = f;
        b /= f;
      }
    }
    pi_scale.push_back(s);
  }

  VarLayout lay;
  lay.n = n;
  lay.m = m;
  lay.ntau = static_cast<int>(pis.size());

  const bool with_cons = opts.include_constraints;
  const bool with_state = with_cons && state_constraint_active(cons.S_x);

  // Block order: initial, decrease, [input], [state], multiplier cone.
  sdp::Problem prob;
  const int b_init = 0;
  prob.blocks.push_back({sdp::BlockKind::Dense, n + 1});
  const int b_dec = 1;
  prob.blocks.push_back({sdp::BlockKind::Dense, 4 * n + 2 * m});
  int b_in = -1, b_st = -1;
  if (with_cons) {
    b_in = static_cast<int>(prob.blocks.size());
    prob.blocks.push_back({sdp::BlockKind::Dense, n + m});
  }
  Mat sx_halfinv;  // scaling used for the state block when S_x is PD
  bool state_raw = false;
  if (with_state) {
    b_st = static_cast<int>(prob.blocks.size());
    prob.blocks.push_back({sdp::BlockKind::Dense, 2 * n});
    Eigen::SelfAdjointEigenSolver<Mat> es(cons.S_x);
    require(es.info() == Eigen::Success, "synthesize: S_x eigendecomposition failed");
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo > 1e-12 * std::max(1.0, hi)) {
      sx_halfinv = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
    } else {
      state_raw = true;  // singular S_x: keep the raw form (infeasible when rank-deficient)
    }
  }
  const int b_tau = static_cast<int>(prob.blocks.size());
  prob.blocks.push_back({sdp::BlockKind::Diag, lay.ntau});

  const Mat Mu = with_cons ? factor_weight(cons.S_u) : Mat();

  // Constant part F0.
  prob.F0 = sdp::BlockMat(prob.blocks);
  {
    prob.F0.dense(b_init) = build_lmi_initial(x_t, Mat::Zero(n, n));
    prob.F0.dense(b_dec) = -delta * Mat::Identity(4 * n + 2 * m, 4 * n + 2 * m);
    if (with_cons) {
      Mat in0 = Mat::Zero(n + m, n + m);
      in0.block(n, n, m, m).setIdentity();
      prob.F0.dense(b_in) = in0;
    }
    if (with_state) {
      Mat st0 = Mat::Zero(2 * n, 2 * n);
      if (state_raw) {
        st0.topLeftCorner(n, n) = cons.S_x;
        st0.block(0, n, n, n).setIdentity();
        st0.block(n, 0, n, n).setIdentity();
      } else {
        st0.topLeftCorner(n, n).setIdentity();
        st0.block(0, n, n, n) = sx_halfinv;
        st0.block(n, 0, n, n) = sx_halfinv;
      }
      prob.F0.dense(b_st) = st0;
    }
  }

  // Objective: minimize gamma.
  prob.c = Vec::Zero(lay.total());
  prob.c[lay.idx_gamma()] = 1.0;

  // Constraint matrices. The decrease LMI M(y) <= -delta I is encoded as
  // -M(y) - delta I >= 0, so each variable contributes -dM/dy_k there.
  prob.Fk.assign(lay.total(), sdp::ConstraintMat());
  const Mat zero_h = Mat::Zero(n, n);
  const Mat zero_l = Mat::Zero(m, n);
  const Mat zero_pi;

  {  // gamma
    sdp::ConstraintMat& cm = prob.Fk[lay.idx_gamma()];
    cm.add_dense(b_dec, -build_lmi_decrease(zero_h, zero_l, 1.0, zero_pi, weights));
  }
  {  // vech(H)
    int k = lay.idx_h();
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i, ++k) {
        const Mat E = sym_basis(n, i, j);
        sdp::ConstraintMat& cm = prob.Fk[k];
        Mat init = Mat::Zero(n + 1, n + 1);
        init.block(1, 1, n, n) = E;
        cm.add_dense(b_init, init);
        cm.add_dense(b_dec, -build_lmi_decrease(E, zero_l, 0.0, zero_pi, weights));
        if (with_cons) {
          Mat in = Mat::Zero(n + m, n + m);
          in.topLeftCorner(n, n) = E;
          cm.add_dense(b_in, in);
        }
        if (with_state) {
          Mat st = Mat::Zero(2 * n, 2 * n);
          st.block(n, n, n, n) = E;
          cm.add_dense(b_st, st);
        }
      }
  }
  {  // vec(L), column-major
    int k = lay.idx_l();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i, ++k) {
        Mat E = Mat::Zero(m, n);
        E(i, j) = 1.0;
        sdp::ConstraintMat& cm = prob.Fk[k];
        cm.add_dense(b_dec, -build_lmi_decrease(zero_h, E, 0.0, zero_pi, weights));
        if (with_cons) {
          Mat in = Mat::Zero(n + m, n + m);
          const Mat scaled = Mu * E;
          in.block(n, 0, m, n) = scaled;
          in.block(0, n, n, m) = scaled.transpose();
          cm.add_dense(b_in, in);
        }
      }
  }
  {  // multipliers
    for (int i = 0; i < lay.ntau; ++i) {
      sdp::ConstraintMat& cm = prob.Fk[lay.idx_tau() + i];
      cm.add_dense(b_dec, -build_lmi_decrease(zero_h, zero_l, 0.0, pis[i], weights));
      cm.add_diag(b_tau, i, 1.0);
    }
  }

  sdp::Options sopt;
  sopt.tol_gap = opts.tol_gap;
  sopt.tol_feas = opts.tol_feas;
  sopt.max_iter = opts.max_iter;
  sopt.parallel_schur = opts.parallel;
  Vec warm;
  if (opts.warm_from != nullptr && opts.warm_from->status == SynthStatus::Optimal &&
      opts.warm_from->H.rows() == n && opts.warm_from->L.rows() == m &&
      opts.warm_from->tau.mode == opts.mode &&
      static_cast<int>(opts.warm_from->tau.tau.size()) == lay.ntau) {
    Vec tau_scaled = opts.warm_from->tau.tau;
    for (int i = 0; i < lay.ntau; ++i) tau_scaled[i] *= pi_scale[static_cast<size_t>(i)];
    warm = pack_vars(opts.warm_from->H, opts.warm_from->L, opts.warm_from->gamma, tau_scaled, lay);
    sopt.warm_y = &warm;
  }

  sdp::Solution sol = sdp::solve(prob, sopt);
  const auto t_end = std::chrono::steady_clock::now();

  SynthesisResult res;
  res.delta = delta;
  res.solve_time = std::chrono::duration<double>(t_end - t_start).count();
  res.iterations = sol.iterations;
  res.rel_gap = sol.rel_gap;
  res.detail = sol.detail;
  bool degraded = false;
  switch (sol.status) {
    case sdp::Status::Optimal: res.status = SynthStatus::Optimal; break;
    case sdp::Status::Infeasible: res.status = SynthStatus::Infeasible; break;
    default:
      // The interior-point iterate keeps F(y) >= 0 at every step, so a solve
      // that stalls on the dual side can still hold a valid, near-optimal
      // candidate. Recover it and let the independent audit below decide.
      degraded = true;
      res.status = SynthStatus::NumericalFailure;
      break;
  }
  if (res.status == SynthStatus::Infeasible) return res;
  if (degraded && !(std::isfinite(sol.obj) && sol.rel_gap <= 1e-6)) return res;

  res.gamma = sol.y[lay.idx_gamma()];
  res.H = unpack_h(sol.y, lay);
  res.L = unpack_l(sol.y, lay);
  res.tau.mode = opts.mode;
  res.tau.tau = sol.y.segment(lay.idx_tau(), lay.ntau);
  for (int i = 0; i < lay.ntau; ++i) {
    res.tau.tau[i] /= pi_scale[static_cast<size_t>(i)];
    if (res.tau.tau[i] < 0.0) res.tau.tau[i] = 0.0;  // clip solver-tolerance dust
  }

  const ControllerCertificate cert = recover_certificate(res);
  if (!cert.ok) {
    res.status = SynthStatus::NumericalFailure;
    res.detail = "certificate recovery failed: H is numerically singular";
    return res;
  }
  res.F = cert.F;
  res.P = cert.P;
  if (degraded) {
    const CandidateAudit audit =
        audit_candidate(x_t, blocks, weights, cons, res, opts.include_constraints);
    if (audit.feasible) {
      res.status = SynthStatus::Optimal;
      res.detail = "near-optimal iterate accepted by the feasibility audit (" + sol.detail + ")";
    }
  }
  return res;
}

ControllerCertificate recover_certificate(const SynthesisResult& r) {
  ControllerCertificate cert;
  cert.gamma = r.gamma;
  Eigen::SelfAdjointEigenSolver<Mat> es(r.H);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (es.info() != Eigen::Success || lo <= 0.0 || hi / lo > 1e12) return cert;
  const Mat h_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose();
  cert.F = r.L * h_inv;
  cert.P = symmetrized(r.gamma * h_inv);
  cert.ok = true;
  return cert;
}

CandidateAudit audit_candidate(const Vec& x_t, const PiBlocks& blocks,
                               const CostWeights& weights, const ConstraintSets& cons,
                               const SynthesisResult& cand, bool include_constraints,
                               double tol) {
  CandidateAudit audit;
  audit.worst = -std::numeric_limits<double>::infinity();
  auto track = [&audit](double violation) {
    if (violation > audit.worst) audit.worst = violation;
  };
  auto min_eig = [](const Mat& S) {
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };

  {  // initial-state LMI
    const Mat init = build_lmi_initial(x_t, cand.H);
    track(-min_eig(init) / (1.0 + init.norm()));
  }
  {  // decrease LMI: lambda_max(M) <= -delta
    const Mat pi = assemble_pi(blocks, cand.tau);
    const Mat M = build_lmi_decrease(cand.H, cand.L, cand.gamma, pi, weights);
    const double delta = strictness_margin(x_t);
    Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
    track((es.eigenvalues().maxCoeff() + delta) / (1.0 + M.norm()));
  }
  if (include_constraints) {
    const Mat in = build_lmi_input(cand.H, cand.L, cons.S_u);
    track(-min_eig(in) / (1.0 + in.norm()));
    if (state_constraint_active(cons.S_x)) {
      const Mat st = build_lmi_state(cand.H, cons.S_x);
      track(-min_eig(st) / (1.0 + st.norm()));
    }
  }
  track(cand.tau.tau.size() > 0 ? -cand.tau.tau.minCoeff() : 0.0);

  audit.feasible = audit.worst <= tol;
  return audit;
}

}  // namespace ddmpc
