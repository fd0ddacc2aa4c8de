// ddmpc: data-driven min-max MPC toolkit.
//
// Subcommands: generate-data, synthesize, simulate, verify, reproduce-cstr.
// Every command is deterministic given its config and seeds; each artifact
// directory carries a metadata file that reproduces it exactly.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddmpc/consistency.hpp"
#include "ddmpc/csv.hpp"
#include "ddmpc/mpc.hpp"
#include "ddmpc/presets.hpp"
#include "ddmpc/verify.hpp"

namespace fs = std::filesystem;
using namespace ddmpc;

namespace {

constexpr int kOk = 0;
constexpr int kUnexpected = 1;
constexpr int kInfeasible = 2;
constexpr int kVerifyFail = 3;
constexpr int kIoConfig = 4;

struct CommonArgs {
  std::string preset;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_out) {
  cmd->add_option("--preset", args.preset, "built-in preset name (cstr)");
  cmd->add_option("--config", args.config_path, "config file (merged over the preset)");
  cmd->add_option("--set", args.sets, "override a config key, e.g. --set weights.R=1")
      ->take_all();
  args.out_dir = default_out;
  cmd->add_option("--out", args.out_dir, "output directory");
}

Config resolve_config(const CommonArgs& args) {
  Config cfg;
  if (!args.preset.empty()) {
    if (args.preset != "cstr")
      throw ConfigError("unknown preset '" + args.preset + "' (available: cstr)");
    cfg = cstr_preset();
  }
  if (!args.config_path.empty()) cfg.merge(Config::parse_file(args.config_path));
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void write_metadata(const fs::path& dir, const Config& cfg, const std::string& command) {
  Config meta;
  meta.set("meta.version", kArtifactVersion);
  meta.set("meta.command", command);
  write_text_file((dir / "metadata.txt").string(), meta.serialize() + "\n" + cfg.serialize());
}

DataSet load_or_generate_data(const Config& cfg, const std::string& data_path) {
  if (data_path.empty()) return dataset_from_config(cfg);
  const Trajectory traj = read_trajectory_csv(data_path);
  DataSet data;
  data.X = traj.X;
  data.U = traj.U;
  data.eps = cfg.get_num("data.eps");
  return data;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

// Axis-aligned extent of the ellipsoid {v : v'Sv <= 1}: sqrt((S^-1)_ii).
std::string axis_bounds(const Mat& S) {
  std::ostringstream os;
  os << "[";
  if (S.size() > 0 && S.norm() > 0.0) {
    const Mat Sinv = S.inverse();
    for (int i = 0; i < S.rows(); ++i)
      os << (i ? ", " : "") << std::sqrt(std::max(Sinv(i, i), 0.0));
  } else {
    for (int i = 0; i < std::max<int>(1, static_cast<int>(S.rows())); ++i)
      os << (i ? ", " : "") << "None";
  }
  os << "]";
  return os.str();
}

const char* kPlotTemplate = R"PY(#!/usr/bin/env python3
"""Render state/input trajectories with constraint bounds from the run CSVs."""
import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(HERE, name)) as f:
        return list(csv.DictReader(f))


traj = read("trajectory.csv")
steps = read("steps.csv")
n = @N@
m = @M@
xb = @XB@  # per-axis state bound, None if unconstrained
ub = @UB@  # per-axis input bound

t = [int(r["t"]) for r in traj]
fig, axes = plt.subplots(3, 1, figsize=(8, 10), sharex=True)
for i in range(n):
    xs = [float(r["x%d" % (i + 1)]) for r in traj]
    axes[0].plot(t, xs, label="x%d" % (i + 1))
    if xb[i] is not None:
        axes[0].axhline(xb[i], ls="--", c="gray", lw=0.8)
        axes[0].axhline(-xb[i], ls="--", c="gray", lw=0.8)
axes[0].set_ylabel("state")
axes[0].legend()
for j in range(m):
    us = [float(r["u%d" % (j + 1)]) for r in traj if r["u%d" % (j + 1)] != ""]
    axes[1].step(t[: len(us)], us, where="post", label="u%d" % (j + 1))
    if ub[j] is not None:
        axes[1].axhline(ub[j], ls="--", c="gray", lw=0.8)
        axes[1].axhline(-ub[j], ls="--", c="gray", lw=0.8)
axes[1].set_ylabel("input")
axes[1].legend()
if steps:
    ts = [int(r["t"]) for r in steps]
    axes[2].plot(ts, [float(r["gamma"]) for r in steps], label="certified bound")
    axes[2].plot(ts, [float(r["stage_cost"]) for r in steps], label="stage cost")
    axes[2].set_yscale("log")
axes[2].set_xlabel("t")
axes[2].legend()
fig.tight_layout()
out = os.path.join(HERE, "run.png")
fig.savefig(out, dpi=150)
print("wrote", out)
)PY";

void write_plot_script(const fs::path& dir, int n, int m, const ConstraintSets& cons) {
  std::string script = kPlotTemplate;
  script = replace_all(script, "@N@", std::to_string(n));
  script = replace_all(script, "@M@", std::to_string(m));
  script = replace_all(script, "@XB@", axis_bounds(cons.S_x));
  script = replace_all(script, "@UB@", axis_bounds(cons.S_u));
  write_text_file((dir / "plot_run.py").string(), script);
}

void write_run_dir(const fs::path& dir, const Config& cfg, const std::string& command,
                   const ClosedLoopRun& run, const ConstraintSets& cons, double eps) {
  fs::create_directories(dir);
  write_text_file((dir / "trajectory.csv").string(), trajectory_to_csv(run.traj));
  write_text_file((dir / "steps.csv").string(), step_log_to_csv(to_step_log(run)));
  if (!run.steps.empty() && run.first_certificate.status == SynthStatus::Optimal) {
    const Config cert = certificate_to_config(run.first_certificate, run.steps.front().x, eps);
    write_text_file((dir / "certificate.txt").string(), cert.serialize());
  }
  write_plot_script(dir, static_cast<int>(run.traj.X.rows()),
                    static_cast<int>(run.traj.U.rows()), cons);
  write_metadata(dir, cfg, command);
}

int cmd_generate_data(const CommonArgs& args) {
  const Config cfg = resolve_config(args);
  const DataSet data = dataset_from_config(cfg);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  write_text_file((dir / "trajectory.csv").string(), trajectory_to_csv(data.trajectory()));
  write_metadata(dir, cfg, "generate-data");
  std::cout << "wrote " << (dir / "trajectory.csv").string() << " (" << data.X.cols()
            << " states, " << data.U.cols() << " inputs, eps=" << data.eps << ")\n";
  return kOk;
}

int cmd_synthesize(const CommonArgs& args, const std::string& data_path,
                   const std::string& x_text, const std::string& cert_path) {
  const Config cfg = resolve_config(args);
  const DataSet data = load_or_generate_data(cfg, data_path);
  const CostWeights weights = weights_from_config(cfg);
  const ConstraintSets cons = constraints_from_config(cfg);
  const SynthesisOptions sopt = synth_options_from_config(cfg);
  const Vec x_t = x_text.empty() ? cfg.get_vec("mpc.x0") : parse_vec(x_text, "--x");

  const PiBlocks blocks = build_pi_blocks(data);
  const SynthesisResult res = synthesize(x_t, blocks, weights, cons, sopt);

  std::cout << "status:     " << to_string(res.status) << "\n";
  if (!res.detail.empty()) std::cout << "detail:     " << res.detail << "\n";
  std::cout << "iterations: " << res.iterations << "\n";
  std::cout << "solve time: " << res.solve_time << " s\n";
  if (res.status == SynthStatus::Optimal) {
    std::cout << "gamma:      " << fmt17(res.gamma) << "\n";
    std::cout << "F:          " << format_mat(res.F) << "\n";
    std::cout << "P:          " << format_mat(res.P) << "\n";
    if (!cert_path.empty()) {
      write_text_file(cert_path, certificate_to_config(res, x_t, data.eps).serialize());
      std::cout << "wrote " << cert_path << "\n";
    }
  }
  return res.status == SynthStatus::Optimal ? kOk : kInfeasible;
}

int cmd_simulate(const CommonArgs& args, const std::string& data_path) {
  const Config cfg = resolve_config(args);
  const LtiSystem sys = plant_from_config(cfg);
  const DataSet data = load_or_generate_data(cfg, data_path);
  const CostWeights weights = weights_from_config(cfg);
  const ConstraintSets cons = constraints_from_config(cfg);
  const MpcConfig mc = mpc_config_from_config(cfg);
  const Vec x0 = cfg.get_vec("mpc.x0");

  Rng rng(static_cast<std::uint64_t>(cfg.get_int("mpc.noise_seed", 7)));
  const ClosedLoopRun run = run_closed_loop(sys, data, weights, cons, x0, mc, rng);
  write_run_dir(fs::path(args.out_dir), cfg, "simulate", run, cons, data.eps);
  std::cout << summarize(run, weights);
  std::cout << "run directory:            " << args.out_dir << "\n";
  return kOk;
}

int cmd_verify(const CommonArgs& args, const std::string& cert_path,
               const std::string& data_path) {
  const Config cfg = resolve_config(args);
  const Certificate cert = certificate_from_config(Config::parse_file(cert_path));
  const Trajectory traj = read_trajectory_csv(data_path);
  DataSet data;
  data.X = traj.X;
  data.U = traj.U;
  data.eps = cert.eps;

  const int n = data.n();
  require_dims(cert.result.H.rows() == n && cert.result.H.cols() == n,
               "certificate H is " + std::to_string(cert.result.H.rows()) + "x" +
                   std::to_string(cert.result.H.cols()) + " but the data has n=" +
                   std::to_string(n));
  require_dims(cert.result.F.cols() == n && cert.result.F.rows() == data.m(),
               "certificate F dimensions do not match the data");
  require_dims(static_cast<int>(cert.x_t.size()) == n,
               "certificate x_t dimension does not match the data");

  const VerifySettings vs = verify_settings_from_config(cfg);
  const CostWeights weights = weights_from_config(cfg);

  Rng rng(vs.seed);
  Rng sys_rng = rng.derive(1);
  const ConsistentSamples samples = sample_consistent(data, vs.system_samples, sys_rng, vs.parallel);

  std::vector<CheckReport> checks;
  {  // internal consistency: F = L H^-1 and P = gamma H^-1, recomputed
    CheckReport c;
    c.name = "certificate-consistency";
    c.tol = 1e-8;
    const double fh = (cert.result.F * cert.result.H - cert.result.L).norm() /
                      (1.0 + cert.result.L.norm());
    const double ph =
        (cert.result.P * cert.result.H - cert.result.gamma * Mat::Identity(n, n)).norm() /
        (1.0 + cert.result.gamma);
    c.total = 2;
    c.worst = std::max(fh, ph);
    c.violations = (fh > c.tol ? 1 : 0) + (ph > c.tol ? 1 : 0);
    c.pass = c.violations == 0;
    c.detail = "F H = L and P H = gamma I, recomputed from the certificate file";
    checks.push_back(c);
  }
  checks.push_back(check_decrease(cert.result.F, cert.result.P, weights, samples.systems,
                                  vs.parallel));
  if (cert.result.gamma > 0.0) {
    Rng state_rng = rng.derive(2);
    const std::vector<Vec> states =
        boundary_states(cert.result.P, cert.result.gamma, vs.boundary_count, state_rng);
    checks.push_back(check_rpi(cert.result.F, cert.result.P, cert.result.gamma, samples.systems,
                               states, vs.rpi_depth, vs.parallel));
    checks.push_back(check_cost_bound(cert.result.F, cert.result.gamma, cert.x_t, weights,
                                      samples.systems, vs.cost_horizon, vs.parallel));
  }

  std::ostringstream head;
  head << "certificate: " << cert_path << "\n";
  head << "data:        " << data_path << " (T=" << data.T() << ", eps=" << fmt17(data.eps)
       << (data.eps == 0.0 ? ", singleton consistency set" : "") << ")\n";
  head << "samples:     " << samples.systems.size() << " consistent systems";
  if (samples.undersampled) head << " (undersampled)";
  head << ", " << vs.boundary_count << " boundary states, depth " << vs.rpi_depth << "\n\n";
  const std::string report = head.str() + render_report(checks);
  std::cout << report;

  bool all_pass = true;
  Config summary;
  summary.set("verify.version", kArtifactVersion);
  summary.set("verify.system_samples", std::to_string(samples.systems.size()));
  summary.set("verify.undersampled", samples.undersampled ? "true" : "false");
  for (const CheckReport& c : checks) {
    all_pass = all_pass && c.pass;
    summary.set("checks." + c.name + ".pass", c.pass ? "true" : "false");
    summary.set("checks." + c.name + ".total", std::to_string(c.total));
    summary.set("checks." + c.name + ".violations", std::to_string(c.violations));
    summary.set("checks." + c.name + ".worst", fmt17(c.worst));
    summary.set("checks." + c.name + ".tolerance", fmt17(c.tol));
  }
  summary.set("verify.pass", all_pass ? "true" : "false");

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  write_text_file((dir / "report.txt").string(), report);
  write_text_file((dir / "summary.txt").string(), summary.serialize());
  std::cout << (all_pass ? "verification PASSED" : "verification FAILED") << "\n";
  return all_pass ? kOk : kVerifyFail;
}

struct BenchRun {
  std::string name;
  double R = 0.0;
  bool noisy = false;
  double reference = 0.0;  // 0 = no published value
  double band_lo = 0.0, band_hi = 0.0;
  double final_norm_limit = 0.0;
  // results
  bool ok = false;
  std::string error;
  double cost = 0.0, gamma0 = 0.0, final_norm = 0.0, max_cons = 0.0;
  bool feasible_all = true;
};

BenchRun execute_bench(const Config& base, BenchRun spec, const fs::path& out_root,
                       bool write_dir) {
  Config cfg = base;
  cfg.set("weights.R", fmt17(spec.R));
  cfg.set("mpc.noise_eps", spec.noisy ? cfg.get_str("data.eps", "1e-6") : "0");
  try {
    const LtiSystem sys = plant_from_config(cfg);
    const DataSet data = dataset_from_config(cfg);
    const CostWeights weights = weights_from_config(cfg);
    const ConstraintSets cons = constraints_from_config(cfg);
    const MpcConfig mc = mpc_config_from_config(cfg);
    Rng rng(static_cast<std::uint64_t>(cfg.get_int("mpc.noise_seed", 7)));
    const ClosedLoopRun run =
        run_closed_loop(sys, data, weights, cons, cfg.get_vec("mpc.x0"), mc, rng);
    spec.cost = run.total_cost;
    spec.gamma0 = run.gamma0;
    spec.final_norm = run.traj.X.col(run.traj.X.cols() - 1).norm();
    for (const StepRecord& s : run.steps) {
      spec.max_cons = std::max({spec.max_cons, s.norm_u_su, s.norm_x_sx});
      spec.feasible_all = spec.feasible_all && s.solver_status == SynthStatus::Optimal;
    }
    spec.ok = true;
    if (write_dir) write_run_dir(out_root / spec.name, cfg, "reproduce-cstr", run, cons, data.eps);
  } catch (const Error& e) {
    spec.ok = false;
    spec.error = e.what();
  }
  return spec;
}

int cmd_reproduce_cstr(const CommonArgs& args, long seeds) {
  Config base = cstr_preset();
  if (!args.config_path.empty()) base.merge(Config::parse_file(args.config_path));
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    base.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const fs::path out_root(args.out_dir);
  fs::create_directories(out_root);

  std::vector<BenchRun> specs;
  specs.push_back({"cstr-R1e-4-noisefree", 1e-4, false, 0.0369, 0.030, 0.047, 1e-3,
                   false, "", 0, 0, 0, 0, true});
  specs.push_back({"cstr-R1e-4-noisy", 1e-4, true, 0.0411, 0.031, 0.055, 0.02,
                   false, "", 0, 0, 0, 0, true});
  specs.push_back({"cstr-R1-noisefree", 1.0, false, 0, 0, 0, 1e-3,
                   false, "", 0, 0, 0, 0, true});
  specs.push_back({"cstr-R1-noisy", 1.0, true, 0, 0, 0, 0.02,
                   false, "", 0, 0, 0, 0, true});
  for (BenchRun& s : specs) s = execute_bench(base, s, out_root, true);

  std::cout << std::left << std::setw(22) << "run" << std::setw(8) << "R" << std::setw(7)
            << "noise" << std::setw(12) << "total cost" << std::setw(11) << "reference"
            << std::setw(17) << "band" << "verdict\n";
  std::cout << std::string(84, '-') << "\n";
  bool all_pass = true;
  bool any_infeasible = false;
  for (const BenchRun& s : specs) {
    std::cout << std::left << std::setw(22) << s.name << std::setw(8) << s.R << std::setw(7)
              << (s.noisy ? "yes" : "no");
    if (!s.ok) {
      std::cout << "FAILED: " << s.error << "\n";
      any_infeasible = true;
      all_pass = false;
      continue;
    }
    std::ostringstream cost;
    cost << std::fixed << std::setprecision(5) << s.cost;
    std::cout << std::setw(12) << cost.str();
    const bool banded = s.band_hi > 0.0;
    if (banded) {
      std::ostringstream ref, band;
      ref << std::fixed << std::setprecision(4) << s.reference;
      band << "[" << std::setprecision(3) << s.band_lo << ", " << s.band_hi << "]";
      const bool in_band = s.cost >= s.band_lo && s.cost <= s.band_hi;
      const bool good = in_band && s.feasible_all && s.max_cons <= 1.0 &&
                        s.final_norm <= s.final_norm_limit;
      std::cout << std::setw(11) << ref.str() << std::setw(17) << band.str()
                << (good ? "PASS" : "FAIL");
      if (!in_band) std::cout << " (out of band)";
      if (!s.feasible_all) std::cout << " (infeasible steps)";
      if (s.max_cons > 1.0) std::cout << " (constraint violated)";
      if (s.final_norm > s.final_norm_limit) std::cout << " (final state too large)";
      all_pass = all_pass && good;
    } else {
      std::cout << std::setw(11) << "-" << std::setw(17) << "-" << "-";
    }
    std::cout << "\n";
  }

  const BenchRun& free_run = specs[0];
  const BenchRun& noisy_run = specs[1];
  if (free_run.ok && noisy_run.ok) {
    const bool ordered = noisy_run.cost >= free_run.cost;
    std::cout << "\nmatched-seed ordering (noisy >= noise-free): "
              << (ordered ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(5)
              << noisy_run.cost << " vs " << free_run.cost << ")\n";
    all_pass = all_pass && ordered;
  }

  if (seeds > 1) {
    std::cout << "\nseed sweep (" << seeds << " seeds, R=1e-4):\n";
    std::cout << std::left << std::setw(8) << "seed" << std::setw(14) << "noise-free"
              << std::setw(14) << "noisy" << "\n";
    const long base_data_seed = base.get_int("data.seed", 1);
    const long base_noise_seed = base.get_int("mpc.noise_seed", 7);
    std::vector<double> free_costs, noisy_costs;
    for (long i = 0; i < seeds; ++i) {
      Config cfg = base;
      cfg.set("data.seed", std::to_string(base_data_seed + i));
      cfg.set("mpc.noise_seed", std::to_string(base_noise_seed + i));
      BenchRun f = execute_bench(cfg, {"", 1e-4, false, 0, 0, 0, 0, false, "", 0, 0, 0, 0, true},
                                 out_root, false);
      BenchRun z = execute_bench(cfg, {"", 1e-4, true, 0, 0, 0, 0, false, "", 0, 0, 0, 0, true},
                                 out_root, false);
      std::cout << std::left << std::setw(8) << (base_data_seed + i);
      if (f.ok) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(5) << f.cost;
        std::cout << std::setw(14) << v.str();
        free_costs.push_back(f.cost);
      } else {
        std::cout << std::setw(14) << "failed";
      }
      if (z.ok) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(5) << z.cost;
        std::cout << std::setw(14) << v.str();
        noisy_costs.push_back(z.cost);
      } else {
        std::cout << std::setw(14) << "failed";
      }
      std::cout << "\n";
    }
    auto dispersion = [](std::vector<double> v) -> std::string {
      if (v.empty()) return "no successful runs";
      std::sort(v.begin(), v.end());
      std::ostringstream os;
      os << std::fixed << std::setprecision(5) << "min " << v.front() << ", median "
         << v[v.size() / 2] << ", max " << v.back() << " (" << v.size() << " runs)";
      return os.str();
    };
    std::cout << "noise-free dispersion: " << dispersion(free_costs) << "\n";
    std::cout << "noisy dispersion:      " << dispersion(noisy_costs) << "\n";
  }

  if (any_infeasible) return kInfeasible;
  return all_pass ? kOk : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data-driven min-max MPC toolkit"};
  app.require_subcommand(1);

  CommonArgs gen_args, syn_args, sim_args, ver_args, rep_args;
  std::string syn_data, syn_x, syn_cert;
  std::string sim_data;
  std::string ver_cert, ver_data;
  long rep_seeds = 1;

  CLI::App* gen = app.add_subcommand("generate-data", "generate offline input-state data");
  add_common(gen, gen_args, "runs/generate-data");

  CLI::App* syn = app.add_subcommand("synthesize", "solve the robust synthesis problem once");
  add_common(syn, syn_args, "runs/synthesize");
  syn->add_option("--data", syn_data, "trajectory CSV (default: generate from config)");
  syn->add_option("--x", syn_x, "state to synthesize at, e.g. --x=-0.01,-0.04");
  syn->add_option("--certificate", syn_cert, "write the certificate to this file");

  CLI::App* sim = app.add_subcommand("simulate", "run the closed loop and log it");
  add_common(sim, sim_args, "runs/simulate");
  sim->add_option("--data", sim_data, "trajectory CSV (default: generate from config)");

  CLI::App* ver = app.add_subcommand("verify", "independently check a certificate");
  add_common(ver, ver_args, "runs/verify");
  ver->add_option("--certificate", ver_cert, "certificate file")->required();
  ver->add_option("--data", ver_data, "trajectory CSV the certificate was computed from")
      ->required();

  CLI::App* rep = app.add_subcommand("reproduce-cstr", "run the full benchmark protocol");
  add_common(rep, rep_args, "runs/reproduce-cstr");
  rep->add_option("--seeds", rep_seeds, "number of seeds for the dispersion report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the parse error
    return rc == 0 ? 0 : kIoConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate_data(gen_args);
    if (syn->parsed()) return cmd_synthesize(syn_args, syn_data, syn_x, syn_cert);
    if (sim->parsed()) return cmd_simulate(sim_args, sim_data);
    if (ver->parsed()) return cmd_verify(ver_args, ver_cert, ver_data);
    if (rep->parsed()) return cmd_reproduce_cstr(rep_args, rep_seeds);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kIoConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoConfig;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kIoConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}
