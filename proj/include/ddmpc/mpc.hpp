#pragma once

#include <string>
#include <vector>

#include "ddmpc/csv.hpp"
#include "ddmpc/lti.hpp"
#include "ddmpc/synthesis.hpp"
#include "ddmpc/types.hpp"

namespace ddmpc {

// Thrown when no valid certificate exists at some step of the closed loop.
struct InfeasibleError : Error {
  int t;
  InfeasibleError(int t_, const std::string& what_) : Error(what_), t(t_) {}
};

double stage_cost(const Vec& x, const Vec& u, const CostWeights& weights);

struct MpcConfig {
  int horizon = 300;
  double convergence_threshold = 1e-6;  // ||x|| below this declares convergence
  double origin_threshold = 1e-9;       // ||x|| below this skips the solve
  SynthesisOptions synth;
  bool warm_start = false;  // reuse the previous solution as solver warm start
  NoiseModel noise{0.0, NoiseDist::Zero};
  // A fresh solution replaces the carried certificate only when it improves
  // the bound and does not increase the certified cost-to-go at the state.
  double gamma_improvement = 1e-6;  // relative
  double value_slack = 1e-9;        // absolute
  double audit_tol = 1e-5;          // carried-certificate feasibility tolerance
};

struct StepRecord {
  int t = 0;
  Vec x, u;
  double gamma = 0.0;
  double stage_cost = 0.0;
  double norm_u_su = 0.0;  // u' S_u u
  double norm_x_sx = 0.0;  // x' S_x x
  SynthStatus solver_status = SynthStatus::Optimal;
  double solve_time = 0.0;
  int iterations = 0;
  bool fresh = false;  // certificate adopted from this step's solve
  Mat F, P;            // gain and certificate in force at this step
};

struct ClosedLoopRun {
  std::vector<StepRecord> steps;
  Trajectory traj;
  double total_cost = 0.0;
  double gamma0 = 0.0;
  bool converged = false;
  int convergence_step = -1;
  SynthesisResult first_certificate;  // certificate in force at t = 0
  SynthesisResult final_certificate;  // certificate in force at the last step
};

// Simulates the receding-horizon loop on the true system. Each step solves
// the synthesis problem at the current state, keeps the best certificate seen
// so far (the previous one remains feasible along the nominal closed loop),
// and applies u = F x. Throws InfeasibleError when neither a fresh solution
// nor the carried certificate is valid.
ClosedLoopRun run_closed_loop(const LtiSystem& sys, const DataSet& data,
                              const CostWeights& weights, const ConstraintSets& cons,
                              const Vec& x0, const MpcConfig& cfg, Rng& rng);

std::vector<StepLogRow> to_step_log(const ClosedLoopRun& run);
std::string summarize(const ClosedLoopRun& run, const CostWeights& weights);

}  // namespace ddmpc
