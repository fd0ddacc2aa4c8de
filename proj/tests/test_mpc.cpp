#include <doctest.h>

#include <cmath>

#include "ddmpc/mpc.hpp"
#include "ddmpc/presets.hpp"
#include "ddmpc/verify.hpp"

using namespace ddmpc;

namespace {

struct Bench {
  LtiSystem sys;
  DataSet data;
  CostWeights weights;
  ConstraintSets cons;
  Vec x0;
  MpcConfig cfg;
};

// Reactor benchmark truncated to keep unit-test solves fast.
Bench small_bench(int horizon = 25, long T_keep = 120) {
  Config c = cstr_preset();
  Bench b;
  b.sys = plant_from_config(c);
  b.data = dataset_from_config(c);
  if (T_keep < b.data.T()) {
    b.data.X = b.data.X.leftCols(T_keep + 1).eval();
    b.data.U = b.data.U.leftCols(T_keep).eval();
  }
  b.weights = weights_from_config(c);
  b.cons = constraints_from_config(c);
  b.x0 = c.get_vec("mpc.x0");
  b.cfg = mpc_config_from_config(c);
  b.cfg.horizon = horizon;
  return b;
}

}  // namespace

TEST_CASE("mpc: stage cost is x'Qx + u'Ru") {
  Mat Q(2, 2);
  Q << 1, 0, 0, 2;
  Mat R = Mat::Constant(1, 1, 3.0);
  CostWeights w = CostWeights::make(Q, R);
  Vec x(2), u(1);
  x << 1, 2;
  u << 2;
  CHECK(stage_cost(x, u, w) == doctest::Approx(21.0).epsilon(1e-14));
  Vec zu = Vec::Zero(1);
  CHECK(stage_cost(x, zu, w) == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("mpc: starting at the origin applies zero input and converges at once") {
  Bench b = small_bench(5);
  Rng rng(1);
  ClosedLoopRun run = run_closed_loop(b.sys, b.data, b.weights, b.cons, Vec::Zero(2), b.cfg, rng);
  CHECK(run.converged);
  CHECK(run.convergence_step == 0);
  CHECK(run.total_cost == 0.0);
  CHECK(run.gamma0 == 0.0);
  for (const auto& s : run.steps) CHECK(s.u.norm() == 0.0);
}

TEST_CASE("mpc: closed loop is deterministic") {
  Bench b = small_bench(10);
  Rng r1(3), r2(3);
  ClosedLoopRun a = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, r1);
  ClosedLoopRun c = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, r2);
  CHECK(a.traj.X == c.traj.X);
  CHECK(a.traj.U == c.traj.U);
  CHECK(a.total_cost == c.total_cost);
}

TEST_CASE("mpc: bound sequence is monotone and steps stay feasible") {
  Bench b = small_bench(25);
  Rng rng(5);
  ClosedLoopRun run = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, rng);
  REQUIRE(static_cast<int>(run.steps.size()) >= 1);
  CHECK(run.gamma0 > 0.0);
  double prev = run.steps[0].gamma;
  for (const auto& s : run.steps) {
    CHECK(s.solver_status == SynthStatus::Optimal);
    CHECK(s.gamma <= prev * (1.0 + 1e-12));
    prev = s.gamma;
    CHECK(s.norm_u_su <= 1.0 + 1e-9);
    CHECK(s.norm_x_sx <= 1.0 + 1e-9);
  }
  // the run logs gain and certificate at every step
  for (const auto& s : run.steps) {
    REQUIRE(s.F.size() == 2);
    REQUIRE(s.P.size() == 4);
    CHECK(s.u == (s.F * s.x).eval());
  }
  // accumulated cost within the certified bound
  CHECK(run.total_cost <= run.gamma0 * (1.0 + 1e-6));
  // logged guarantees hold
  GuaranteeReport rep = check_closed_loop_guarantees(run, b.weights);
  CHECK(rep.feasibility.pass);
  CHECK(rep.constraints.pass);
  CHECK(rep.candidate.pass);
  CHECK(rep.decrease.pass);
}

TEST_CASE("mpc: warm start changes solver effort, not the result") {
  Bench b = small_bench(12);
  b.cfg.warm_start = false;
  Rng r1(7);
  ClosedLoopRun cold = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, r1);
  b.cfg.warm_start = true;
  Rng r2(7);
  ClosedLoopRun warm = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, r2);
  REQUIRE(cold.steps.size() == warm.steps.size());
  CHECK(warm.total_cost == doctest::Approx(cold.total_cost).epsilon(1e-6));
  for (size_t i = 0; i < cold.steps.size(); ++i) {
    CHECK(warm.steps[i].gamma == doctest::Approx(cold.steps[i].gamma).epsilon(1e-5));
    CHECK((warm.steps[i].x - cold.steps[i].x).norm() <= 1e-6 * (1.0 + cold.steps[i].x.norm()));
  }
}

TEST_CASE("mpc: process noise keeps the loop feasible and bounded") {
  Bench b = small_bench(20);
  b.cfg.noise = NoiseModel{b.data.eps, NoiseDist::UniformInBall};
  Rng rng(11);
  ClosedLoopRun run = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, rng);
  for (const auto& s : run.steps) {
    CHECK(s.norm_u_su <= 1.0 + 1e-9);
    CHECK(s.norm_x_sx <= 1.0 + 1e-9);
  }
  // noise excludes exact convergence to zero but the state must stay small
  CHECK(run.traj.X.col(run.traj.X.cols() - 1).norm() < 0.1);
}

TEST_CASE("mpc: infeasible problems raise a step-stamped error") {
  // Unstable scalar plant with |u| <= 1: no robust controller exists from
  // x = 4 (stabilization needs |u| >= (a-1)|x| = 2), so step 0 must throw.
  Bench b;
  b.sys.A = Mat::Constant(1, 1, 1.5);
  b.sys.B = Mat::Constant(1, 1, 1.0);
  Rng data_rng(5);
  Mat inputs(1, 40);
  for (int t = 0; t < 40; ++t) inputs(0, t) = data_rng.uniform(-1.0, 1.0);
  b.data = generate_dataset(b.sys, Vec::Constant(1, 0.5), inputs,
                            NoiseModel{1e-5, NoiseDist::UniformInBall}, data_rng);
  b.weights = CostWeights::make(Mat::Identity(1, 1), Mat::Identity(1, 1));
  b.cons = ConstraintSets{Mat::Identity(1, 1), Mat::Zero(1, 1)};
  b.cfg.horizon = 5;
  Rng rng(13);
  try {
    run_closed_loop(b.sys, b.data, b.weights, b.cons, Vec::Constant(1, 4.0), b.cfg, rng);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.t == 0);
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
  }
}

TEST_CASE("mpc: step log mirrors the run") {
  Bench b = small_bench(8);
  Rng rng(17);
  ClosedLoopRun run = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, rng);
  std::vector<StepLogRow> log = to_step_log(run);
  REQUIRE(log.size() == run.steps.size());
  for (size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].t == run.steps[i].t);
    CHECK(log[i].gamma == run.steps[i].gamma);
    CHECK(log[i].stage_cost == run.steps[i].stage_cost);
    CHECK(log[i].solver_status == to_string(run.steps[i].solver_status));
  }
  std::string text = summarize(run, b.weights);
  CHECK(text.find("gamma_0") != std::string::npos);
  CHECK(text.find("accumulated cost") != std::string::npos);
}

TEST_CASE("mpc: zero horizon yields an empty run") {
  Bench b = small_bench(0);
  Rng rng(19);
  ClosedLoopRun run = run_closed_loop(b.sys, b.data, b.weights, b.cons, b.x0, b.cfg, rng);
  CHECK(run.steps.empty());
  CHECK(run.total_cost == 0.0);
  CHECK(run.traj.X.cols() == 1);
  CHECK(run.traj.U.cols() == 0);
}
