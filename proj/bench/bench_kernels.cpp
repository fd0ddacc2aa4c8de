// Compares the OpenMP kernels against their serial reference paths on the
// reactor benchmark and reports timings plus a result-equality column.

#include <chrono>
#include <cstdio>
#include <string>

#include "ddmpc/consistency.hpp"
#include "ddmpc/mpc.hpp"
#include "ddmpc/presets.hpp"
#include "ddmpc/synthesis.hpp"
#include "ddmpc/verify.hpp"

#ifdef DDMPC_HAVE_OPENMP
#include <omp.h>
#endif

using namespace ddmpc;

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const std::string& name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-34s %12.2f %12.2f %9.2fx   %s\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms, equal ? "identical" : "DIFFERS");
}

}  // namespace

int main() {
  const Config cfg = cstr_preset();
  const DataSet data = dataset_from_config(cfg);
  const CostWeights weights = weights_from_config(cfg);
  const ConstraintSets cons = constraints_from_config(cfg);
  const Vec x0 = cfg.get_vec("mpc.x0");
  const PiBlocks blocks = build_pi_blocks(data);

#ifdef DDMPC_HAVE_OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp threads: built without OpenMP\n");
#endif
  std::printf("%-34s %12s %12s %10s   %s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup",
              "results");
  std::printf("%s\n", std::string(86, '-').c_str());

  // robust synthesis SDP (Schur-complement assembly is the parallel kernel)
  SynthesisOptions ser, par;
  ser.parallel = false;
  par.parallel = true;
  SynthesisResult rs, rp;
  const double t_ser = time_ms([&] { rs = synthesize(x0, blocks, weights, cons, ser); }, 2);
  const double t_par = time_ms([&] { rp = synthesize(x0, blocks, weights, cons, par); }, 2);
  row("synthesize (T=200 SDP)", t_ser, t_par, rs.gamma == rp.gamma && rs.H == rp.H);

  // consistency-set rejection sampler
  ConsistentSamples ss, sp;
  const double s_ser = time_ms(
      [&] {
        Rng rng(11);
        ss = sample_consistent(data, 400, rng, false);
      },
      3);
  const double s_par = time_ms(
      [&] {
        Rng rng(11);
        sp = sample_consistent(data, 400, rng, true);
      },
      3);
  bool sample_eq = ss.systems.size() == sp.systems.size();
  for (size_t i = 0; sample_eq && i < ss.systems.size(); ++i)
    sample_eq = ss.systems[i].first == sp.systems[i].first &&
                ss.systems[i].second == sp.systems[i].second;
  row("sample_consistent (400 systems)", s_ser, s_par, sample_eq);

  // verification sweeps over the sampled systems
  Rng srng(11);
  const ConsistentSamples samples = sample_consistent(data, 1000, srng);
  const Mat F = rp.F, P = rp.P;
  const double gamma = rp.gamma;

  CheckReport d_s, d_p;
  const double d_ser =
      time_ms([&] { d_s = check_decrease(F, P, weights, samples.systems, false); }, 3);
  const double d_par =
      time_ms([&] { d_p = check_decrease(F, P, weights, samples.systems, true); }, 3);
  row("check_decrease (1000 systems)", d_ser, d_par, d_s.worst == d_p.worst);

  Rng brng(13);
  const std::vector<Vec> states = boundary_states(P, gamma, 100, brng);
  CheckReport r_s, r_p;
  const double r_ser =
      time_ms([&] { r_s = check_rpi(F, P, gamma, samples.systems, states, 20, false); }, 3);
  const double r_par =
      time_ms([&] { r_p = check_rpi(F, P, gamma, samples.systems, states, 20, true); }, 3);
  row("check_rpi (1000 x 100 x 20)", r_ser, r_par, r_s.worst == r_p.worst);

  CheckReport c_s, c_p;
  const double c_ser = time_ms(
      [&] { c_s = check_cost_bound(F, gamma, x0, weights, samples.systems, 10000, false); }, 3);
  const double c_par = time_ms(
      [&] { c_p = check_cost_bound(F, gamma, x0, weights, samples.systems, 10000, true); }, 3);
  row("check_cost_bound (1000 systems)", c_ser, c_par, c_s.worst == c_p.worst);

  return 0;
}
