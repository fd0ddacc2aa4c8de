#include "ddmpc/rng.hpp"

#include <cmath>

namespace ddmpc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

double Rng::uniform01() {
  return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::normal_vec(int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal();
  return v;
}

Vec Rng::ball(int dim, double sq_radius) {
  if (sq_radius <= 0.0) return Vec::Zero(dim);
  Vec dir = normal_vec(dim);
  double nrm = dir.norm();
  while (nrm == 0.0) {  // astronomically unlikely; keep the draw well defined
    dir = normal_vec(dim);
    nrm = dir.norm();
  }
  const double radius =
      std::sqrt(sq_radius) * std::pow(uniform01(), 1.0 / static_cast<double>(dim));
  return dir * (radius / nrm);
}

Vec Rng::sphere(int dim, double sq_radius) {
  if (sq_radius <= 0.0) return Vec::Zero(dim);
  Vec dir = normal_vec(dim);
  double nrm = dir.norm();
  while (nrm == 0.0) {
    dir = normal_vec(dim);
    nrm = dir.norm();
  }
  return dir * (std::sqrt(sq_radius) / nrm);
}

Rng Rng::derive(std::uint64_t stream_id) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream_id + 0x51ed2701a2b4c93fULL)));
}

}  // namespace ddmpc
