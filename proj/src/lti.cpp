#include "ddmpc/lti.hpp"

#include "ddmpc/config.hpp"

namespace ddmpc {

NoiseDist noise_dist_from_string(const std::string& s) {
  if (s == "uniform-in-ball") return NoiseDist::UniformInBall;
  if (s == "boundary") return NoiseDist::Boundary;
  if (s == "zero") return NoiseDist::Zero;
  throw ConfigError("unknown noise distribution '" + s +
                    "' (want uniform-in-ball, boundary, or zero)");
}

std::string to_string(NoiseDist d) {
  switch (d) {
    case NoiseDist::UniformInBall: return "uniform-in-ball";
    case NoiseDist::Boundary: return "boundary";
    case NoiseDist::Zero: return "zero";
  }
  return "?";
}

Vec step(const LtiSystem& sys, const Vec& x, const Vec& u, const Vec& w) {
  require_dims(sys.A.rows() == sys.A.cols(), "A must be square");
  require_dims(sys.B.rows() == sys.A.rows(), "B row count must match A");
  require_dims(x.size() == sys.n(), "state has dimension " + std::to_string(x.size()) +
                                        ", system expects " + std::to_string(sys.n()));
  require_dims(u.size() == sys.m(), "input has dimension " + std::to_string(u.size()) +
                                        ", system expects " + std::to_string(sys.m()));
  require_dims(w.size() == sys.n(), "noise has dimension " + std::to_string(w.size()) +
                                        ", system expects " + std::to_string(sys.n()));
  return sys.A * x + sys.B * u + w;
}

Vec sample_noise(const NoiseModel& model, int dim, Rng& rng) {
  require(model.eps >= 0.0, "noise bound eps must be nonnegative");
  switch (model.dist) {
    case NoiseDist::Zero: return Vec::Zero(dim);
    case NoiseDist::Boundary: return rng.sphere(dim, model.eps);
    case NoiseDist::UniformInBall: return rng.ball(dim, model.eps);
  }
  return Vec::Zero(dim);
}

DataSet generate_dataset(const LtiSystem& sys, const Vec& x0, const Mat& inputs,
                         const NoiseModel& noise, Rng& rng) {
  const long T = inputs.cols();
  require(T >= 1, "dataset needs at least one sample (T >= 1)");
  require_dims(inputs.rows() == sys.m(), "input rows must match system input dimension");
  require_dims(x0.size() == sys.n(), "x0 dimension must match system state dimension");
  DataSet data;
  data.eps = noise.eps;
  data.X.resize(sys.n(), T + 1);
  data.U = inputs;
  data.X.col(0) = x0;
  for (long i = 0; i < T; ++i) {
    const Vec w = sample_noise(noise, sys.n(), rng);
    data.X.col(i + 1) = step(sys, data.X.col(i), data.U.col(i), w);
  }
  return data;
}

}  // namespace ddmpc
