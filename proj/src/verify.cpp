#include "ddmpc/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ddmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fills the report's pass/worst fields from a margin array (deterministic:
// a serial scan, regardless of how the margins were produced).
void finalize(CheckReport& rep, const std::vector<double>& margins) {
  rep.total = static_cast<long>(margins.size());
  rep.worst = -kInf;
  for (long i = 0; i < rep.total; ++i) {
    const double mi = margins[static_cast<size_t>(i)];
    if (mi > rep.worst) {
      rep.worst = mi;
      rep.worst_index = i;
    }
    if (mi > rep.tol) ++rep.violations;
  }
  if (rep.total == 0) rep.worst = 0.0;
  rep.pass = rep.violations == 0;
}

double max_eig(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

std::vector<Vec> boundary_states(const Mat& P, double gamma, long count, Rng& rng) {
  require(P.rows() == P.cols() && P.size() > 0, "boundary_states: P must be square");
  require(gamma > 0.0, "boundary_states: gamma must be positive");
  const int n = static_cast<int>(P.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0,
          "boundary_states: P must be positive definite");
  const Mat half_inv = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(count));
  for (long i = 0; i < count; ++i)
    out.push_back(std::sqrt(gamma) * (half_inv * rng.sphere(n, 1.0)));
  return out;
}

CheckReport check_decrease(const Mat& F, const Mat& P, const CostWeights& weights,
                           const SystemSamples& samples, bool parallel) {
  CheckReport rep;
  rep.name = "decrease";
  rep.tol = 1e-6;
  const long N = static_cast<long>(samples.size());
  std::vector<double> margins(static_cast<size_t>(N));
  const Mat base = weights.Q + F.transpose() * weights.R * F - P;
  auto body = [&](long i) {
    const Mat acl = samples[static_cast<size_t>(i)].first + samples[static_cast<size_t>(i)].second * F;
    margins[static_cast<size_t>(i)] = max_eig(acl.transpose() * P * acl + base);
  };
#ifdef DDMPC_HAVE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < N; ++i) body(i);
  } else
#endif
  {
    (void)parallel;
    for (long i = 0; i < N; ++i) body(i);
  }
  finalize(rep, margins);
  rep.detail = "max eig of (A+BF)'P(A+BF) - P + F'RF + Q over sampled systems";
  return rep;
}

CheckReport check_rpi(const Mat& F, const Mat& P, double gamma, const SystemSamples& samples,
                      const std::vector<Vec>& trial_states, int depth, bool parallel) {
  CheckReport rep;
  rep.name = "rpi";
  rep.tol = 1e-8;
  const long N = static_cast<long>(samples.size());
  const long S = static_cast<long>(trial_states.size());
  const double scale = std::max(gamma, 1e-300);
  std::vector<double> margins(static_cast<size_t>(N * S));
  auto body = [&](long idx) {
    const long i = idx / std::max<long>(S, 1);
    const long j = idx % std::max<long>(S, 1);
    const Mat acl = samples[static_cast<size_t>(i)].first + samples[static_cast<size_t>(i)].second * F;
    Vec x = trial_states[static_cast<size_t>(j)];
    double worst = (x.dot(P * x) - gamma) / scale;
    for (int k = 0; k < depth; ++k) {
      x = acl * x;
      worst = std::max(worst, (x.dot(P * x) - gamma) / scale);
    }
    margins[static_cast<size_t>(idx)] = worst;
  };
#ifdef DDMPC_HAVE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < N * S; ++idx) body(idx);
  } else
#endif
  {
    (void)parallel;
    for (long idx = 0; idx < N * S; ++idx) body(idx);
  }
  finalize(rep, margins);
  rep.detail = "relative excess of x'Px over gamma along " + std::to_string(depth) +
               "-step sampled closed loops from boundary states";
  return rep;
}

CheckReport check_cost_bound(const Mat& F, double gamma, const Vec& x_t,
                             const CostWeights& weights, const SystemSamples& samples,
                             long sim_horizon, bool parallel) {
  CheckReport rep;
  rep.name = "cost-bound";
  rep.tol = 1e-6;
  const long N = static_cast<long>(samples.size());
  const double scale = std::max(gamma, 1e-300);
  std::vector<double> margins(static_cast<size_t>(N));
  auto body = [&](long i) {
    const Mat acl = samples[static_cast<size_t>(i)].first + samples[static_cast<size_t>(i)].second * F;
    Vec x = x_t;
    double cost = 0.0;
    double margin;
    for (long k = 0;; ++k) {
      const double nx = x.norm();
      if (nx > 1e6) {  // diverging sample: the decrease certificate is violated
        margin = kInf;
        break;
      }
      if (nx < 1e-10 || k >= sim_horizon) {
        margin = (cost - gamma) / scale;
        break;
      }
      const Vec u = F * x;
      cost += x.dot(weights.Q * x) + u.dot(weights.R * u);
      x = acl * x;
    }
    margins[static_cast<size_t>(i)] = margin;
  };
#ifdef DDMPC_HAVE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < N; ++i) body(i);
  } else
#endif
  {
    (void)parallel;
    for (long i = 0; i < N; ++i) body(i);
  }
  finalize(rep, margins);
  rep.detail = "relative excess of accumulated open-loop cost over gamma";
  return rep;
}

GuaranteeReport check_closed_loop_guarantees(const ClosedLoopRun& run,
                                             const CostWeights& weights) {
  GuaranteeReport g;
  const long T = static_cast<long>(run.steps.size());

  {
    g.feasibility.name = "feasibility";
    g.feasibility.tol = 0.0;
    std::vector<double> margins(static_cast<size_t>(T));
    for (long t = 0; t < T; ++t)
      margins[static_cast<size_t>(t)] =
          run.steps[static_cast<size_t>(t)].solver_status == SynthStatus::Optimal ? -1.0 : 1.0;
    finalize(g.feasibility, margins);
    g.feasibility.detail = "every step holds a feasible certificate";
  }
  {
    g.constraints.name = "constraints";
    g.constraints.tol = 1e-12;
    std::vector<double> margins(static_cast<size_t>(T));
    for (long t = 0; t < T; ++t) {
      const StepRecord& s = run.steps[static_cast<size_t>(t)];
      margins[static_cast<size_t>(t)] = std::max(s.norm_u_su, s.norm_x_sx) - 1.0;
    }
    finalize(g.constraints, margins);
    g.constraints.detail = "ellipsoidal input/state constraint values <= 1";
  }
  {
    g.candidate.name = "candidate-step";
    g.candidate.tol = 1e-8;
    std::vector<double> margins(T > 1 ? static_cast<size_t>(T - 1) : 0);
    for (long t = 0; t + 1 < T; ++t) {
      const StepRecord& a = run.steps[static_cast<size_t>(t)];
      const StepRecord& b = run.steps[static_cast<size_t>(t + 1)];
      margins[static_cast<size_t>(t)] = b.x.dot(b.P * b.x) - b.x.dot(a.P * b.x);
    }
    finalize(g.candidate, margins);
    g.candidate.detail = "x'P x under the new certificate <= under the previous one";
  }
  {
    g.decrease.name = "lyapunov-decrease";
    g.decrease.tol = 1e-8;
    const double lam_q =
        Eigen::SelfAdjointEigenSolver<Mat>(weights.Q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    std::vector<double> margins(T > 1 ? static_cast<size_t>(T - 1) : 0);
    for (long t = 0; t + 1 < T; ++t) {
      const StepRecord& a = run.steps[static_cast<size_t>(t)];
      const StepRecord& b = run.steps[static_cast<size_t>(t + 1)];
      margins[static_cast<size_t>(t)] =
          b.x.dot(b.P * b.x) - a.x.dot(a.P * a.x) + lam_q * a.x.squaredNorm();
    }
    finalize(g.decrease, margins);
    g.decrease.detail = "x'Px decreases by at least lambda_min(Q) ||x||^2 each step";
  }
  return g;
}

std::string render_report(const std::vector<CheckReport>& checks) {
  std::ostringstream os;
  os << std::left << std::setw(20) << "check" << std::setw(8) << "result" << std::right
     << std::setw(10) << "checks" << std::setw(12) << "violations" << std::setw(16)
     << "worst margin" << std::setw(12) << "tolerance"
     << "\n";
  os << std::string(78, '-') << "\n";
  for (const CheckReport& c : checks) {
    os << std::left << std::setw(20) << c.name << std::setw(8) << (c.pass ? "PASS" : "FAIL")
       << std::right << std::setw(10) << c.total << std::setw(12) << c.violations;
    std::ostringstream num;
    num << std::scientific << std::setprecision(3) << c.worst;
    os << std::setw(16) << num.str();
    std::ostringstream tol;
    tol << std::scientific << std::setprecision(0) << c.tol;
    os << std::setw(12) << tol.str() << "\n";
    if (!c.detail.empty()) os << "    " << c.detail << "\n";
  }
  return os.str();
}

}  // namespace ddmpc
