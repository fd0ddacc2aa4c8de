#include "ddmpc/presets.hpp"

namespace ddmpc {

Config cstr_preset() {
  Config c;
  c.set("plant.A", "0.9749, -0.0135; 0.0004, 0.9888");
  c.set("plant.B", "4.1e-6; 5.934e-4");

  c.set("data.T", "200");
  c.set("data.eps", "1e-6");
  c.set("data.noise_dist", "uniform-in-ball");
  c.set("data.input_low", "-10");
  c.set("data.input_high", "10");
  c.set("data.x0", "0.01, 0.01");
  c.set("data.seed", "1");

  c.set("weights.Q", "1, 0; 0, 1");
  c.set("weights.R", "1e-4");

  c.set("constraints.S_u", "0.01");
  c.set("constraints.S_x", "1000, 0; 0, 500");

  c.set("synthesis.multiplier_mode", "per-sample");
  c.set("synthesis.include_constraints", "true");
  c.set("synthesis.normalize_pi", "true");
  c.set("synthesis.tol_gap", "1e-9");
  c.set("synthesis.tol_feas", "1e-9");
  c.set("synthesis.max_iter", "100");
  c.set("synthesis.parallel", "true");

  c.set("mpc.x0", "-0.01, -0.04");
  c.set("mpc.horizon", "300");
  c.set("mpc.convergence_threshold", "1e-6");
  c.set("mpc.origin_threshold", "1e-9");
  c.set("mpc.noise_eps", "0");
  c.set("mpc.noise_dist", "uniform-in-ball");
  c.set("mpc.noise_seed", "7");
  c.set("mpc.warm_start", "false");
  c.set("mpc.gamma_improvement", "1e-6");
  c.set("mpc.value_slack", "1e-9");
  c.set("mpc.audit_tol", "1e-5");

  c.set("verify.system_samples", "1000");
  c.set("verify.boundary_states", "100");
  c.set("verify.rpi_depth", "20");
  c.set("verify.cost_horizon", "10000");
  c.set("verify.seed", "11");
  c.set("verify.parallel", "true");
  return c;
}

LtiSystem plant_from_config(const Config& cfg) {
  LtiSystem sys;
  sys.A = cfg.get_mat("plant.A");
  sys.B = cfg.get_mat("plant.B");
  require(sys.A.rows() == sys.A.cols(), "plant.A must be square");
  require(sys.B.rows() == sys.A.rows(), "plant.B row count must match plant.A");
  return sys;
}

NoiseModel data_noise_from_config(const Config& cfg) {
  NoiseModel nm;
  nm.eps = cfg.get_num("data.eps", 0.0);
  nm.dist = noise_dist_from_string(cfg.get_str("data.noise_dist", "uniform-in-ball"));
  if (nm.eps == 0.0) nm.dist = NoiseDist::Zero;
  return nm;
}

CostWeights weights_from_config(const Config& cfg) {
  return CostWeights::make(cfg.get_mat("weights.Q"), cfg.get_mat("weights.R"));
}

ConstraintSets constraints_from_config(const Config& cfg) {
  ConstraintSets cons;
  cons.S_u = cfg.get_mat("constraints.S_u");
  cons.S_x = cfg.has("constraints.S_x") ? cfg.get_mat("constraints.S_x") : Mat();
  return cons;
}

SynthesisOptions synth_options_from_config(const Config& cfg) {
  SynthesisOptions o;
  const std::string mode = cfg.get_str("synthesis.multiplier_mode", "per-sample");
  if (mode == "per-sample") {
    o.mode = MultiplierMode::PerSample;
  } else if (mode == "common") {
    o.mode = MultiplierMode::Common;
  } else {
    throw ConfigError("synthesis.multiplier_mode must be 'per-sample' or 'common', got '" +
                      mode + "'");
  }
  o.include_constraints = cfg.get_bool("synthesis.include_constraints", true);
  o.normalize_pi = cfg.get_bool("synthesis.normalize_pi", true);
  o.tol_gap = cfg.get_num("synthesis.tol_gap", 1e-9);
  o.tol_feas = cfg.get_num("synthesis.tol_feas", 1e-9);
  o.max_iter = static_cast<int>(cfg.get_int("synthesis.max_iter", 100));
  o.parallel = cfg.get_bool("synthesis.parallel", true);
  return o;
}

MpcConfig mpc_config_from_config(const Config& cfg) {
  MpcConfig mc;
  mc.horizon = static_cast<int>(cfg.get_int("mpc.horizon", 300));
  mc.convergence_threshold = cfg.get_num("mpc.convergence_threshold", 1e-6);
  mc.origin_threshold = cfg.get_num("mpc.origin_threshold", 1e-9);
  mc.synth = synth_options_from_config(cfg);
  mc.warm_start = cfg.get_bool("mpc.warm_start", false);
  mc.noise.eps = cfg.get_num("mpc.noise_eps", 0.0);
  mc.noise.dist = noise_dist_from_string(cfg.get_str("mpc.noise_dist", "uniform-in-ball"));
  if (mc.noise.eps == 0.0) mc.noise.dist = NoiseDist::Zero;
  mc.gamma_improvement = cfg.get_num("mpc.gamma_improvement", 1e-6);
  mc.value_slack = cfg.get_num("mpc.value_slack", 1e-9);
  mc.audit_tol = cfg.get_num("mpc.audit_tol", 1e-5);
  return mc;
}

VerifySettings verify_settings_from_config(const Config& cfg) {
  VerifySettings v;
  v.system_samples = cfg.get_int("verify.system_samples", 1000);
  v.boundary_count = cfg.get_int("verify.boundary_states", 100);
  v.rpi_depth = static_cast<int>(cfg.get_int("verify.rpi_depth", 20));
  v.cost_horizon = cfg.get_int("verify.cost_horizon", 10000);
  v.seed = static_cast<std::uint64_t>(cfg.get_int("verify.seed", 11));
  v.parallel = cfg.get_bool("verify.parallel", true);
  return v;
}

Config certificate_to_config(const SynthesisResult& r, const Vec& x_t, double eps) {
  Config c;
  c.set("certificate.version", kArtifactVersion);
  c.set("certificate.status", to_string(r.status));
  c.set("certificate.gamma", fmt17(r.gamma));
  c.set("certificate.H", format_mat(r.H));
  c.set("certificate.L", format_mat(r.L));
  c.set("certificate.F", format_mat(r.F));
  c.set("certificate.P", format_mat(r.P));
  c.set("certificate.delta", fmt17(r.delta));
  c.set("context.x_t", format_vec(x_t));
  c.set("context.eps", fmt17(eps));
  c.set("context.multiplier_mode",
        r.tau.mode == MultiplierMode::PerSample ? "per-sample" : "common");
  c.set("context.tau", format_vec(r.tau.tau));
  return c;
}

Certificate certificate_from_config(const Config& cfg) {
  Certificate cert;
  const std::string status = cfg.get_str("certificate.status");
  if (status == "optimal") {
    cert.result.status = SynthStatus::Optimal;
  } else if (status == "infeasible") {
    cert.result.status = SynthStatus::Infeasible;
  } else if (status == "numerical-failure") {
    cert.result.status = SynthStatus::NumericalFailure;
  } else {
    throw ConfigError("certificate.status has unknown value '" + status + "'");
  }
  cert.result.gamma = cfg.get_num("certificate.gamma");
  cert.result.H = cfg.get_mat("certificate.H");
  cert.result.L = cfg.get_mat("certificate.L");
  cert.result.F = cfg.get_mat("certificate.F");
  cert.result.P = cfg.get_mat("certificate.P");
  cert.result.delta = cfg.get_num("certificate.delta", 0.0);
  cert.x_t = cfg.get_vec("context.x_t");
  cert.eps = cfg.get_num("context.eps");
  const std::string mode = cfg.get_str("context.multiplier_mode", "per-sample");
  cert.result.tau.mode = mode == "common" ? MultiplierMode::Common : MultiplierMode::PerSample;
  cert.result.tau.tau = cfg.get_vec("context.tau");
  return cert;
}

DataSet dataset_from_config(const Config& cfg) {
  const LtiSystem sys = plant_from_config(cfg);
  const long T = cfg.get_int("data.T");
  require(T >= 1, "data.T must be at least 1");
  const double lo = cfg.get_num("data.input_low", -10.0);
  const double hi = cfg.get_num("data.input_high", 10.0);
  require(lo <= hi, "data.input_low must not exceed data.input_high");
  Vec x0 = cfg.has("data.x0") ? cfg.get_vec("data.x0") : Vec(Vec::Zero(sys.n()));
  require(static_cast<int>(x0.size()) == sys.n(), "data.x0 dimension must match the plant");

  Rng rng(static_cast<std::uint64_t>(cfg.get_int("data.seed", 1)));
  Mat inputs(sys.m(), T);
  for (long t = 0; t < T; ++t)
    for (int i = 0; i < sys.m(); ++i) inputs(i, t) = rng.uniform(lo, hi);
  return generate_dataset(sys, x0, inputs, data_noise_from_config(cfg), rng);
}

}  // namespace ddmpc
