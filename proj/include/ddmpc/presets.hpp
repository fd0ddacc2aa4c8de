#pragma once

#include "ddmpc/config.hpp"
#include "ddmpc/lti.hpp"
#include "ddmpc/mpc.hpp"
#include "ddmpc/synthesis.hpp"

namespace ddmpc {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Built-in benchmark preset: a two-state exothermic continuous stirred-tank
// reactor linearized about its operating point (sampled at 0.1 s), with the
// weights, constraints, noise bound, and horizon used by the test suite.
Config cstr_preset();

// Config -> domain objects, shared by the CLI and the tests. Each reader
// validates dimensions and reports the offending key on error.
LtiSystem plant_from_config(const Config& cfg);
NoiseModel data_noise_from_config(const Config& cfg);
CostWeights weights_from_config(const Config& cfg);
ConstraintSets constraints_from_config(const Config& cfg);
SynthesisOptions synth_options_from_config(const Config& cfg);
MpcConfig mpc_config_from_config(const Config& cfg);

struct VerifySettings {
  long system_samples = 1000;
  long boundary_count = 100;
  int rpi_depth = 20;
  long cost_horizon = 10000;
  std::uint64_t seed = 11;
  bool parallel = true;
};
VerifySettings verify_settings_from_config(const Config& cfg);

// Draws the open-loop excitation inputs (uniform per channel) and simulates
// the plant from [data] x0 under the configured offline noise.
DataSet dataset_from_config(const Config& cfg);

// Certificate files are plain key-value text: the decision variables plus the
// context needed to rebuild the consistency set for later verification.
struct Certificate {
  SynthesisResult result;
  Vec x_t;
  double eps = 0.0;
};
Config certificate_to_config(const SynthesisResult& r, const Vec& x_t, double eps);
Certificate certificate_from_config(const Config& cfg);

}  // namespace ddmpc
