#include "ddmpc/mpc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ddmpc/consistency.hpp"

namespace ddmpc {

double stage_cost(const Vec& x, const Vec& u, const CostWeights& weights) {
  require(x.size() == weights.Q.rows(), "stage_cost: state dimension mismatch");
  require(u.size() == weights.R.rows(), "stage_cost: input dimension mismatch");
  return x.dot(weights.Q * x) + u.dot(weights.R * u);
}

ClosedLoopRun run_closed_loop(const LtiSystem& sys, const DataSet& data,
                              const CostWeights& weights, const ConstraintSets& cons,
                              const Vec& x0, const MpcConfig& cfg, Rng& rng) {
  const int n = sys.n();
  const int m = sys.m();
  require(data.n() == n && data.m() == m, "run_closed_loop: data dimension mismatch");
  require(static_cast<int>(x0.size()) == n, "run_closed_loop: x0 dimension mismatch");
  require(cfg.horizon >= 0, "run_closed_loop: horizon must be nonnegative");

  const PiBlocks blocks = build_pi_blocks(data);

  ClosedLoopRun run;
  run.steps.reserve(static_cast<size_t>(cfg.horizon));
  run.traj.X = Mat::Zero(n, cfg.horizon + 1);
  run.traj.U = Mat::Zero(m, cfg.horizon);
  run.traj.X.col(0) = x0;

  std::optional<SynthesisResult> best;  // certificate currently in force
  auto trivial_cert = [&]() {
    SynthesisResult r;
    r.status = SynthStatus::Optimal;
    r.gamma = 0.0;
    r.H = Mat::Identity(n, n);
    r.L = Mat::Zero(m, n);
    r.F = Mat::Zero(m, n);
    r.P = Mat::Zero(n, n);
    r.tau.mode = cfg.synth.mode;
    r.tau.tau = Vec::Zero(cfg.synth.mode == MultiplierMode::PerSample ? blocks.T() : 1);
    r.detail = "zero-gain certificate (origin)";
    return r;
  };
  Vec x = x0;
  for (int t = 0; t < cfg.horizon; ++t) {
    StepRecord rec;
    rec.t = t;
    rec.x = x;

    if (x.norm() <= cfg.origin_threshold) {
      // At the origin the previous gain is reused (zero input if none).
      rec.u = best ? Vec(best->F * x) : Vec(Vec::Zero(m));
      rec.gamma = best ? best->gamma : 0.0;
      rec.F = best ? best->F : Mat::Zero(m, n);
      rec.P = best ? best->P : Mat::Zero(n, n);
      rec.solver_status = SynthStatus::Optimal;
    } else {
      SynthesisOptions sopt = cfg.synth;
      sopt.origin_threshold = cfg.origin_threshold;
      sopt.warm_from = (cfg.warm_start && best) ? &*best : nullptr;
      SynthesisResult fresh = synthesize(x, blocks, weights, cons, sopt);
      rec.solver_status = fresh.status;
      rec.solve_time = fresh.solve_time;
      rec.iterations = fresh.iterations;

      bool carried_ok = false;
      if (best) {
        carried_ok = audit_candidate(x, blocks, weights, cons, *best,
                                     cfg.synth.include_constraints, cfg.audit_tol)
                         .feasible;
      }
      if (!best) {
        if (fresh.status != SynthStatus::Optimal) {
          throw InfeasibleError(
              t, t == 0 ? "synthesis " + to_string(fresh.status) +
                              " at the initial state (t=0); the data or constraints do not "
                              "admit a robust controller from x0"
                        : "no valid certificate at t=" + std::to_string(t) + ": synthesis " +
                              to_string(fresh.status));
        }
        best = fresh;
        rec.fresh = true;
      } else if (carried_ok) {
        const bool improves =
            fresh.status == SynthStatus::Optimal &&
            fresh.gamma < best->gamma * (1.0 - cfg.gamma_improvement) &&
            x.dot(fresh.P * x) <= x.dot(best->P * x) + cfg.value_slack;
        if (improves) {
          best = fresh;
          rec.fresh = true;
        }
      } else {
        if (fresh.status != SynthStatus::Optimal) {
          throw InfeasibleError(
              t, "recursive feasibility violated at t=" + std::to_string(t) +
                     ": fresh synthesis " + to_string(fresh.status) +
                     " and the carried certificate failed its feasibility audit");
        }
        best = fresh;
        rec.fresh = true;
      }
      rec.u = best->F * x;
      rec.gamma = best->gamma;
      rec.F = best->F;
      rec.P = best->P;
    }

    rec.stage_cost = stage_cost(x, rec.u, weights);
    rec.norm_u_su = cons.S_u.size() > 0 ? rec.u.dot(cons.S_u * rec.u) : 0.0;
    rec.norm_x_sx = cons.S_x.size() > 0 ? x.dot(cons.S_x * x) : 0.0;
    run.total_cost += rec.stage_cost;
    if (!run.converged && x.norm() <= cfg.convergence_threshold) {
      run.converged = true;
      run.convergence_step = t;
    }

    const Vec w = sample_noise(cfg.noise, n, rng);
    x = step(sys, x, rec.u, w);
    run.traj.U.col(t) = rec.u;
    run.traj.X.col(t + 1) = x;
    run.steps.push_back(std::move(rec));
    if (t == 0) run.first_certificate = best ? *best : trivial_cert();
  }
  run.final_certificate = best ? *best : trivial_cert();
  if (!run.converged && x.norm() <= cfg.convergence_threshold) {
    run.converged = true;
    run.convergence_step = cfg.horizon;
  }
  run.gamma0 = run.steps.empty() ? 0.0 : run.steps.front().gamma;
  return run;
}

std::vector<StepLogRow> to_step_log(const ClosedLoopRun& run) {
  std::vector<StepLogRow> rows;
  rows.reserve(run.steps.size());
  for (const StepRecord& s : run.steps) {
    StepLogRow row;
    row.t = s.t;
    row.gamma = s.gamma;
    row.stage_cost = s.stage_cost;
    row.norm_u_su = s.norm_u_su;
    row.norm_x_sx = s.norm_x_sx;
    row.solver_status = to_string(s.solver_status);
    row.solve_time = s.solve_time;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summarize(const ClosedLoopRun& run, const CostWeights& weights) {
  std::ostringstream os;
  const int T = static_cast<int>(run.steps.size());
  os << "closed-loop steps:        " << T << "\n";
  os << "certified bound gamma_0:  " << fmt17(run.gamma0) << "\n";
  os << "accumulated cost:         " << fmt17(run.total_cost) << "\n";
  if (T > 0) {
    double gamma_ratio_max = 0.0;
    double max_u = 0.0, max_x = 0.0;
    double worst_lyap = -std::numeric_limits<double>::infinity();
    const double lam_q = Eigen::SelfAdjointEigenSolver<Mat>(weights.Q).eigenvalues().minCoeff();
    for (int t = 0; t < T; ++t) {
      const StepRecord& s = run.steps[static_cast<size_t>(t)];
      max_u = std::max(max_u, s.norm_u_su);
      max_x = std::max(max_x, s.norm_x_sx);
      if (t > 0) {
        const StepRecord& p = run.steps[static_cast<size_t>(t - 1)];
        if (p.gamma > 0.0) gamma_ratio_max = std::max(gamma_ratio_max, s.gamma / p.gamma);
        const double v_now = s.x.dot(s.P * s.x);
        const double v_prev_cert = s.x.dot(p.P * s.x);
        const double v_prev = p.x.dot(p.P * p.x);
        worst_lyap = std::max(worst_lyap, v_prev_cert - v_prev + lam_q * p.x.squaredNorm());
        worst_lyap = std::max(worst_lyap, v_now - v_prev_cert);
      }
    }
    os << "max u-constraint value:   " << fmt17(max_u) << "\n";
    os << "max x-constraint value:   " << fmt17(max_x) << "\n";
    os << "max gamma ratio (t+1/t):  " << fmt17(gamma_ratio_max) << "\n";
    os << "worst decrease margin:    " << fmt17(worst_lyap) << "\n";
  }
  os << "converged:                " << (run.converged ? "yes" : "no");
  if (run.converged) os << " (step " << run.convergence_step << ")";
  os << "\n";
  const Vec xf = run.traj.X.col(run.traj.X.cols() - 1);
  os << "final state norm:         " << fmt17(xf.norm()) << "\n";
  double max_gamma = 0.0, max_state = xf.norm();
  for (const StepRecord& s : run.steps) {
    max_gamma = std::max(max_gamma, s.gamma);
    max_state = std::max(max_state, s.x.norm());
  }
  const bool bounded = max_state <= 1e3 && max_gamma <= 2.0 * run.gamma0 + 1e-12;
  os << "classification:           "
     << (run.converged ? "converged" : (bounded ? "bounded, not converged" : "diverged")) << "\n";
  return os.str();
}

}  // namespace ddmpc
