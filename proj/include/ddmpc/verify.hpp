#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddmpc/mpc.hpp"
#include "ddmpc/rng.hpp"
#include "ddmpc/synthesis.hpp"
#include "ddmpc/types.hpp"

namespace ddmpc {

// All checks are eigenvalue- or simulation-based and never touch the SDP
// solver, so a passing report is independent evidence for a certificate.

struct CheckReport {
  std::string name;
  bool pass = false;
  long total = 0;       // individual assertions evaluated
  long violations = 0;
  double worst = 0.0;   // worst margin; pass iff worst <= tol
  double tol = 0.0;
  long worst_index = -1;
  std::string detail;
};

using SystemSamples = std::vector<std::pair<Mat, Mat>>;

// States on the ellipsoid boundary {x : x'Px = gamma}.
std::vector<Vec> boundary_states(const Mat& P, double gamma, long count, Rng& rng);

// max eig of (A+BF)'P(A+BF) - P + F'RF + Q over samples; pass iff all <= 1e-6.
CheckReport check_decrease(const Mat& F, const Mat& P, const CostWeights& weights,
                           const SystemSamples& samples, bool parallel = true);

// Iterates x -> (A+BF)x for `depth` steps from each trial state; pass iff
// x'Px stays <= gamma * (1 + 1e-8) throughout.
CheckReport check_rpi(const Mat& F, const Mat& P, double gamma, const SystemSamples& samples,
                      const std::vector<Vec>& trial_states, int depth = 20,
                      bool parallel = true);

// Simulates each sampled closed loop from x_t, accumulating stage costs; pass
// iff every accumulated cost <= gamma * (1 + 1e-6). A diverging sample
// (state norm > 1e6) fails immediately; simulation stops early once the state
// norm falls below 1e-10.
CheckReport check_cost_bound(const Mat& F, double gamma, const Vec& x_t,
                             const CostWeights& weights, const SystemSamples& samples,
                             long sim_horizon = 10000, bool parallel = true);

struct GuaranteeReport {
  CheckReport feasibility;   // (i) every step solved or validly carried
  CheckReport constraints;   // (ii) both ellipsoidal norms <= 1 at every step
  CheckReport candidate;     // (iii,a) x'P_{t+1}x <= x'P_t x + 1e-8 at x_{t+1}
  CheckReport decrease;      // (iii,b) value decrease by at least lambda_min(Q)||x||^2
  bool pass() const {
    return feasibility.pass && constraints.pass && candidate.pass && decrease.pass;
  }
};

// Assertions over a logged noise-free closed-loop run.
GuaranteeReport check_closed_loop_guarantees(const ClosedLoopRun& run,
                                             const CostWeights& weights);

std::string render_report(const std::vector<CheckReport>& checks);

}  // namespace ddmpc
