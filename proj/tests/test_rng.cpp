#include <doctest.h>

#include <cmath>
#include <set>

#include "ddmpc/rng.hpp"

using namespace ddmpc;

TEST_CASE("rng: identical seeds give identical streams") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("rng: different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i)
    if (a.uniform01() == b.uniform01()) ++same;
  CHECK(same < 5);
}

TEST_CASE("rng: uniform01 range and mean") {
  Rng r(7);
  double sum = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double v = r.uniform01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / N == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng: uniform(lo,hi) stays in range") {
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    double v = r.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("rng: normal moments") {
  Rng r(21);
  const int N = 50000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    double v = r.normal();
    s1 += v;
    s2 += v * v;
  }
  CHECK(std::abs(s1 / N) < 0.02);
  CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("rng: ball draws satisfy the squared-norm bound and fill the ball") {
  Rng r(5);
  const double eps = 1e-6;
  int outer = 0;
  for (int i = 0; i < 2000; ++i) {
    Vec w = r.ball(2, eps);
    REQUIRE(w.size() == 2);
    REQUIRE(w.squaredNorm() <= eps * (1.0 + 1e-12));
    if (w.squaredNorm() >= 0.5 * eps) ++outer;
  }
  // In 2-d, P(||w||^2 >= eps/2) = 1/2; require a healthy share of outer mass.
  CHECK(outer > 700);
}

TEST_CASE("rng: sphere draws sit exactly on the boundary") {
  Rng r(6);
  const double eps = 3.7e-4;
  for (int i = 0; i < 500; ++i) {
    Vec w = r.sphere(3, eps);
    CHECK(w.squaredNorm() == doctest::Approx(eps).epsilon(1e-12));
  }
}

TEST_CASE("rng: derive is independent of parent consumption order") {
  Rng a(42);
  double before = a.derive(5).uniform01();
  Rng b(42);
  for (int i = 0; i < 17; ++i) b.uniform01();  // consume the parent
  double after = b.derive(5).uniform01();
  CHECK(before == after);
}

TEST_CASE("rng: derived streams differ across ids and from the parent") {
  Rng a(42);
  std::set<double> firsts;
  for (std::uint64_t id = 0; id < 20; ++id) firsts.insert(a.derive(id).uniform01());
  CHECK(firsts.size() == 20);
  Rng fresh(42);
  CHECK(firsts.count(fresh.uniform01()) == 0);
}

TEST_CASE("rng: normal_vec is deterministic and the right size") {
  Rng a(11), b(11);
  Vec va = a.normal_vec(5), vb = b.normal_vec(5);
  REQUIRE(va.size() == 5);
  CHECK(va == vb);
}
