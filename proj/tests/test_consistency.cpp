#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ddmpc/consistency.hpp"
#include "ddmpc/presets.hpp"

using namespace ddmpc;

namespace {

DataSet scalar_sample(double xi, double ui, double xnext, double eps) {
  DataSet d;
  d.X = Mat(1, 2);
  d.X << xi, xnext;
  d.U = Mat(1, 1);
  d.U << ui;
  d.eps = eps;
  return d;
}

DataSet random_dataset(int T, double eps, std::uint64_t seed, LtiSystem* sys_out = nullptr) {
  LtiSystem sys;
  sys.A = Mat(2, 2);
  sys.A << 0.8, 0.1, -0.05, 0.7;
  sys.B = Mat(2, 1);
  sys.B << 1.0, 0.5;
  if (sys_out) *sys_out = sys;
  Rng rng(seed);
  Mat inputs(1, T);
  for (int t = 0; t < T; ++t) inputs(0, t) = rng.uniform(-1.0, 1.0);
  Vec x0(2);
  x0 << 0.3, -0.2;
  NoiseModel noise{eps, eps > 0 ? NoiseDist::UniformInBall : NoiseDist::Zero};
  return generate_dataset(sys, x0, inputs, noise, rng);
}

}  // namespace

TEST_CASE("consistency: quadratic blocks match hand-computed values") {
  // sample (x_i, u_i, x_{i+1}) = (1, 0, 0) with eps = 1
  PiBlocks pb1 = build_pi_blocks(scalar_sample(1.0, 0.0, 0.0, 1.0));
  REQUIRE(pb1.T() == 1);
  REQUIRE(pb1.dim() == 3);
  Mat want1(3, 3);
  want1 << 1, 0, 0, 0, -1, 0, 0, 0, 0;
  CHECK((pb1.blocks[0] - want1).norm() <= 1e-14);

  // sample (2, 3, 1) with eps = 0.5
  PiBlocks pb2 = build_pi_blocks(scalar_sample(2.0, 3.0, 1.0, 0.5));
  Mat want2(3, 3);
  want2 << -0.5, 2, 3, 2, -4, -6, 3, -6, -9;
  CHECK((pb2.blocks[0] - want2).norm() <= 1e-14);
}

TEST_CASE("consistency: quadratic form equals eps*I - r r' for any (A,B)") {
  DataSet data = random_dataset(12, 1e-4, 77);
  PiBlocks pb = build_pi_blocks(data);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Mat A(2, 2), B(2, 1);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = rng.uniform(-1.0, 1.0);
    B(0, 0) = rng.uniform(-1.0, 1.0);
    B(1, 0) = rng.uniform(-1.0, 1.0);
    Mat iab(2, 5);
    iab << Mat::Identity(2, 2), A, B;
    for (long i = 0; i < pb.T(); ++i) {
      Vec r = data.X.col(i + 1) - A * data.X.col(i) - B * data.U.col(i);
      Mat form = iab * pb.blocks[static_cast<size_t>(i)] * iab.transpose();
      Mat want = data.eps * Mat::Identity(2, 2) - r * r.transpose();
      CHECK((form - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }
  }
}

TEST_CASE("consistency: each block has at most n positive and one negative eigenvalue") {
  DataSet data = random_dataset(10, 1e-3, 3);
  PiBlocks pb = build_pi_blocks(data);
  for (const Mat& blk : pb.blocks) {
    Eigen::SelfAdjointEigenSolver<Mat> es(blk, Eigen::EigenvaluesOnly);
    int pos = 0, neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > 1e-12) ++pos;
      if (es.eigenvalues()(i) < -1e-12) ++neg;
    }
    CHECK(pos <= 2);
    CHECK(neg <= 1);
  }
}

TEST_CASE("consistency: single-sample membership matches the residual test") {
  DataSet data = random_dataset(8, 1e-4, 19);
  PiBlocks pb = build_pi_blocks(data);
  Rng rng(23);
  auto [Als, Bls] = least_squares_estimate(data);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Mat A = Als, B = Bls;
    double s = rng.uniform(0.0, 0.05);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) += s * rng.normal();
    B(0, 0) += s * rng.normal();
    B(1, 0) += s * rng.normal();
    for (long j = 0; j < pb.T(); ++j) {
      Vec r = data.X.col(j + 1) - A * data.X.col(j) - B * data.U.col(j);
      double excess = r.squaredNorm() - data.eps;
      if (std::abs(excess) < 1e-12) continue;  // skip knife-edge cases
      Multipliers mult;
      mult.tau = Vec::Zero(pb.T());
      mult.tau(j) = 1.0;
      CHECK(qmi_membership(pb, mult, A, B) == (excess < 0.0));
      ++checked;
    }
  }
  CHECK(checked > 1000);  // the comparison actually exercised both branches
}

TEST_CASE("consistency: assemble_pi is the nonnegative combination of blocks") {
  DataSet data = random_dataset(9, 1e-4, 31);
  PiBlocks pb = build_pi_blocks(data);
  Rng rng(4);
  Multipliers mult;
  mult.tau = Vec(pb.T());
  for (long i = 0; i < pb.T(); ++i) mult.tau(i) = rng.uniform(0.0, 2.0);
  Mat got = assemble_pi(pb, mult);
  Mat want = Mat::Zero(pb.dim(), pb.dim());
  for (long i = 0; i < pb.T(); ++i) want += mult.tau(i) * pb.blocks[static_cast<size_t>(i)];
  CHECK((got - want).norm() <= 1e-12 * (1.0 + want.norm()));

  Multipliers bad;
  bad.tau = mult.tau;
  bad.tau(0) = -1e-9;
  CHECK_THROWS_AS(assemble_pi(pb, bad), Error);
  Multipliers short_tau;
  short_tau.tau = Vec::Ones(pb.T() - 1);
  CHECK_THROWS_AS(assemble_pi(pb, short_tau), Error);
}

TEST_CASE("consistency: the true system lies in the set, distant systems do not") {
  LtiSystem sys;
  DataSet data = random_dataset(30, 1e-5, 101, &sys);
  CHECK(contains(data, sys.A, sys.B));
  CHECK(worst_residual_excess(data, sys.A, sys.B) <= 0.0);
  Mat Afar = sys.A + 0.5 * Mat::Identity(2, 2);
  CHECK_FALSE(contains(data, Afar, sys.B));
  CHECK(worst_residual_excess(data, Afar, sys.B) > 0.0);
}

TEST_CASE("consistency: least squares recovers the truth from noise-free data") {
  LtiSystem sys;
  DataSet data = random_dataset(25, 0.0, 55, &sys);
  auto [A, B] = least_squares_estimate(data);
  CHECK((A - sys.A).norm() <= 1e-8);
  CHECK((B - sys.B).norm() <= 1e-8);
}

TEST_CASE("consistency: sampler output is valid, deterministic, and parallel-safe") {
  DataSet data = random_dataset(20, 1e-5, 202);
  Rng r1(17), r2(17), r3(17);
  ConsistentSamples s1 = sample_consistent(data, 40, r1, true);
  ConsistentSamples s2 = sample_consistent(data, 40, r2, true);
  ConsistentSamples s3 = sample_consistent(data, 40, r3, false);

  CHECK_FALSE(s1.undersampled);
  REQUIRE(static_cast<long>(s1.systems.size()) == 40);
  for (const auto& [A, B] : s1.systems) CHECK(contains(data, A, B));

  REQUIRE(s1.systems.size() == s2.systems.size());
  REQUIRE(s1.systems.size() == s3.systems.size());
  for (size_t i = 0; i < s1.systems.size(); ++i) {
    CHECK(s1.systems[i].first == s2.systems[i].first);   // bitwise
    CHECK(s1.systems[i].second == s2.systems[i].second);
    CHECK(s1.systems[i].first == s3.systems[i].first);   // parallel == serial
    CHECK(s1.systems[i].second == s3.systems[i].second);
  }
}

TEST_CASE("consistency: zero noise bound collapses the sampler to least squares") {
  LtiSystem sys;
  DataSet data = random_dataset(15, 0.0, 303, &sys);
  Rng rng(1);
  ConsistentSamples s = sample_consistent(data, 5, rng, true);
  REQUIRE(s.systems.size() == 1);
  CHECK((s.systems[0].first - sys.A).norm() <= 1e-8);
  CHECK((s.systems[0].second - sys.B).norm() <= 1e-8);
}

TEST_CASE("consistency: preset dataset is reproducible and contains the plant") {
  Config cfg = cstr_preset();
  DataSet d1 = dataset_from_config(cfg);
  DataSet d2 = dataset_from_config(cfg);
  CHECK(d1.X == d2.X);
  CHECK(d1.U == d2.U);
  CHECK(d1.T() == 200);
  LtiSystem sys = plant_from_config(cfg);
  CHECK(contains(d1, sys.A, sys.B));
}
