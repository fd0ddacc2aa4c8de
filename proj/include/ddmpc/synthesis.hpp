#pragma once

#include <string>

#include "ddmpc/consistency.hpp"
#include "ddmpc/sdp.hpp"
#include "ddmpc/types.hpp"

namespace ddmpc {

// Upper-triangular Cholesky factor M with M'M = W. Throws on non-PD input.
Mat factor_weight(const Mat& W);

struct CostWeights {
  Mat Q, R;
  Mat M_Q, M_R;  // cached factors, M'M = W
  static CostWeights make(const Mat& Q, const Mat& R);
  int n() const { return static_cast<int>(Q.rows()); }
  int m() const { return static_cast<int>(R.rows()); }
};

struct ConstraintSets {
  Mat S_u;  // m x m, positive definite
  Mat S_x;  // n x n, positive semidefinite; exact zero disables the state LMI
};

enum class SynthStatus { Optimal, Infeasible, NumericalFailure };
std::string to_string(SynthStatus s);

struct SynthesisResult {
  SynthStatus status = SynthStatus::NumericalFailure;
  double gamma = 0.0;
  Mat H, L;
  Multipliers tau;
  Mat F, P;
  double delta = 0.0;      // strictness margin used for the decrease LMI
  double solve_time = 0.0; // seconds
  int iterations = 0;
  double rel_gap = 0.0;
  std::string detail;
};

struct SynthesisOptions {
  MultiplierMode mode = MultiplierMode::PerSample;
  bool include_constraints = true;
  // Normalize each Pi block to unit Frobenius norm inside the solver
  // (exact reparametrization of tau; improves conditioning).
  bool normalize_pi = true;
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iter = 100;
  bool parallel = true;
  double origin_threshold = 1e-9;
  // Optional warm start from a previous solution (off unless set).
  const SynthesisResult* warm_from = nullptr;
};

// Strictness margin for the decrease LMI ("< 0" implemented as <= -delta I).
double strictness_margin(const Vec& x_t);

// LMI assembly at given variable values (pure functions; the decrease builder
// doubles as the linear map defining the SDP constraint matrices).

// [[1, x'], [x, H]], PSD iff x x' <= H.
Mat build_lmi_initial(const Vec& x_t, const Mat& H);

// The decrease-LMI matrix; the solver enforces it <= -delta I. Layout:
// rows [0, 2n+m) QMI part, [2n+m, 3n+m) middle H part, [3n+m, 4n+2m) cost part.
Mat build_lmi_decrease(const Mat& H, const Mat& L, double gamma, const Mat& pi,
                       const CostWeights& weights);

// Well-scaled congruent form of [[H, L'], [L, S_u^-1]]: with S_u = M'M this is
// [[H, (M L)'], [M L, I]], PSD iff H >= L' S_u L.
Mat build_lmi_input(const Mat& H, const Mat& L, const Mat& S_u);

// [[S_x, I], [I, H]], PSD (for PD H) iff S_x >= H^-1.
Mat build_lmi_state(const Mat& H, const Mat& S_x);

// Solves min gamma subject to the initial-state LMI, the robust decrease LMI,
// the multiplier cone, and (optionally) the input/state constraint LMIs.
SynthesisResult synthesize(const Vec& x_t, const PiBlocks& blocks, const CostWeights& weights,
                           const ConstraintSets& cons, const SynthesisOptions& opts = {});

// Gain and cost certificate derived from a solved (gamma, H, L): F = L H^-1,
// P = gamma H^-1. ok is false when H is numerically singular.
struct ControllerCertificate {
  bool ok = false;
  Mat F, P;
  double gamma = 0.0;
};
ControllerCertificate recover_certificate(const SynthesisResult& r);

// Direct eigenvalue feasibility audit of a candidate (gamma, H, L, tau) at
// state x_t; independent of the solver. Used for candidate carry-over in the
// closed loop and by tests.
struct CandidateAudit {
  bool feasible = false;
  double worst = 0.0;  // most positive violation across all blocks (<=0 when feasible)
};
CandidateAudit audit_candidate(const Vec& x_t, const PiBlocks& blocks,
                               const CostWeights& weights, const ConstraintSets& cons,
                               const SynthesisResult& cand, bool include_constraints = true,
                               double tol = 1e-9);

}  // namespace ddmpc
