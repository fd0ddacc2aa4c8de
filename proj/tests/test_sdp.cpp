#include <doctest.h>

#include <cmath>

#include "ddmpc/sdp.hpp"

using namespace ddmpc;
using namespace ddmpc::sdp;

namespace {

// min y s.t. [[y, 1], [1, y]] >= 0  -> y* = 1 (eigenvalues y +- 1).
Problem two_by_two() {
  Problem p;
  p.blocks = {{BlockKind::Dense, 2}};
  p.F0 = BlockMat(p.blocks);
  p.F0.dense(0) << 0, 1, 1, 0;
  ConstraintMat f1;
  f1.add_dense(0, Mat::Identity(2, 2));
  p.Fk = {f1};
  p.c = Vec::Ones(1);
  return p;
}

// min t s.t. t I - S >= 0 with S = [[2,1],[1,3]] -> t* = lambda_max = (5+sqrt 5)/2.
Problem eigenvalue_problem() {
  Problem p;
  p.blocks = {{BlockKind::Dense, 2}};
  p.F0 = BlockMat(p.blocks);
  p.F0.dense(0) << -2, -1, -1, -3;
  ConstraintMat f1;
  f1.add_dense(0, Mat::Identity(2, 2));
  p.Fk = {f1};
  p.c = Vec::Ones(1);
  return p;
}

// min x + y s.t. x >= 1, y >= 2 as a diagonal block -> obj 3 at (1, 2).
Problem diag_lp() {
  Problem p;
  p.blocks = {{BlockKind::Diag, 2}};
  p.F0 = BlockMat(p.blocks);
  p.F0.diag(0) << -1, -2;
  ConstraintMat fx, fy;
  fx.add_diag(0, 0, 1.0);
  fy.add_diag(0, 1, 1.0);
  p.Fk = {fx, fy};
  p.c = Vec::Ones(2);
  return p;
}

}  // namespace

TEST_CASE("sdp: dense 2x2 with known optimum y* = 1") {
  Solution s = solve(two_by_two());
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.obj == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.rel_gap <= 1e-8);
}

TEST_CASE("sdp: largest eigenvalue via the standard SDP formulation") {
  Solution s = solve(eigenvalue_problem());
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.y(0) == doctest::Approx(3.618033988749895).epsilon(1e-8));
}

TEST_CASE("sdp: diagonal blocks behave as a linear program") {
  Solution s = solve(diag_lp());
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.y(1) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(s.obj == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("sdp: mixed dense and diagonal blocks") {
  // min y1 + y2 s.t. [[y1, 1],[1, y1]] >= 0 (dense), y2 - 2 >= 0 (diag).
  Problem p;
  p.blocks = {{BlockKind::Dense, 2}, {BlockKind::Diag, 1}};
  p.F0 = BlockMat(p.blocks);
  p.F0.dense(0) << 0, 1, 1, 0;
  p.F0.diag(1) << -2;
  ConstraintMat f1, f2;
  f1.add_dense(0, Mat::Identity(2, 2));
  f2.add_diag(1, 0, 1.0);
  p.Fk = {f1, f2};
  p.c = Vec::Ones(2);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.y(1) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("sdp: infeasible constraints are certified") {
  // y >= 1 and -y >= 1 cannot both hold.
  Problem p;
  p.blocks = {{BlockKind::Diag, 2}};
  p.F0 = BlockMat(p.blocks);
  p.F0.diag(0) << -1, -1;
  ConstraintMat f1;
  f1.add_diag(0, 0, 1.0);
  f1.add_diag(0, 1, -1.0);
  p.Fk = {f1};
  p.c = Vec::Ones(1);
  Solution s = solve(p);
  CHECK(s.status == Status::Infeasible);
}

TEST_CASE("sdp: solutions are bitwise deterministic") {
  Solution a = solve(eigenvalue_problem());
  Solution b = solve(eigenvalue_problem());
  REQUIRE(a.status == Status::Optimal);
  CHECK(a.y == b.y);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("sdp: parallel and serial Schur assembly agree bitwise") {
  Problem p = eigenvalue_problem();
  Options serial, par;
  serial.parallel_schur = false;
  par.parallel_schur = true;
  Solution s1 = solve(p, serial);
  Solution s2 = solve(p, par);
  REQUIRE(s1.status == Status::Optimal);
  REQUIRE(s2.status == Status::Optimal);
  CHECK(s1.y == s2.y);
}

TEST_CASE("sdp: warm start converges to the same optimum") {
  Problem p = two_by_two();
  Solution cold = solve(p);
  Options opts;
  Vec y0 = cold.y;
  opts.warm_y = &y0;
  Solution warm = solve(p, opts);
  REQUIRE(warm.status == Status::Optimal);
  CHECK(warm.y(0) == doctest::Approx(cold.y(0)).epsilon(1e-7));
}

TEST_CASE("sdp: duplicated constraint directions stay solvable") {
  // Singular Schur complement: two variables sharing one direction.
  Problem p = two_by_two();
  ConstraintMat f2 = p.Fk[0];
  p.Fk.push_back(f2);
  p.c = Vec::Ones(2);
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.y(0) + s.y(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sdp: residuals reported at the solution are small") {
  Solution s = solve(diag_lp());
  CHECK(s.primal_res <= 1e-7);
  CHECK(s.dual_res <= 1e-7);
  CHECK(s.iterations > 0);
  CHECK(s.iterations <= 100);
}

TEST_CASE("sdp: block matrix utilities") {
  std::vector<BlockSpec> specs = {{BlockKind::Dense, 2}, {BlockKind::Diag, 3}};
  BlockMat a(specs), b(specs);
  a.dense(0) << 1, 2, 2, 5;
  a.diag(1) << 1, 2, 3;
  b.set_identity(2.0);
  CHECK(b.dense(0)(0, 0) == 2.0);
  CHECK(b.diag(1)(2) == 2.0);
  CHECK(a.dot(b) == doctest::Approx(2 * (1 + 5) + 2 * (1 + 2 + 3)));
  CHECK(a.trace() == doctest::Approx(1 + 5 + 1 + 2 + 3));
  BlockMat c = a;
  c.axpy(-1.0, a);
  CHECK(c.norm() == 0.0);
  // dense block eigenvalues are 3 +- 2*sqrt(2); diag entries are >= 1
  CHECK(a.min_eigenvalue() == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("sdp: eval assembles F0 + sum y_k F_k") {
  Problem p = diag_lp();
  Vec y(2);
  y << 3.0, 5.0;
  BlockMat F = p.eval(y);
  CHECK(F.diag(0)(0) == doctest::Approx(3.0 - 1.0));
  CHECK(F.diag(0)(1) == doctest::Approx(5.0 - 2.0));
}
