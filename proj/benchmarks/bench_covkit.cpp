#include <benchmark/benchmark.h>

#include <cmath>
#include <string>

#include "covkit/calibration.hpp"
#include "covkit/constants.hpp"
#include "covkit/entanglement.hpp"
#include "covkit/gaussian.hpp"
#include "covkit/io.hpp"
#include "covkit/parametric.hpp"

namespace {

using namespace covkit;

const CovarianceMatrix& cm_state() {
  static const CovarianceMatrix V =
      io::read_covariance(std::string(COVKIT_FIXTURES) + "/cm.cov");
  return V;
}

void bm_symplectic_eigenvalues(benchmark::State& state) {
  const auto& V = cm_state();
  for (auto _ : state)
    benchmark::DoNotOptimize(symplectic_eigenvalues(V).values);
}
BENCHMARK(bm_symplectic_eigenvalues);

void bm_ppt_test(benchmark::State& state) {
  const auto& V = cm_state();
  const Bipartition b{{"m1"}, {"m2", "m3"}};
  for (auto _ : state) benchmark::DoNotOptimize(ent::ppt_test(V, b));
}
BENCHMARK(bm_ppt_test);

void bm_genuine_witness(benchmark::State& state) {
  const auto& V = cm_state();
  for (auto _ : state) benchmark::DoNotOptimize(ent::genuine_witness(V));
}
BENCHMARK(bm_genuine_witness);

void bm_full_report(benchmark::State& state) {
  const auto& V = cm_state();
  for (auto _ : state) benchmark::DoNotOptimize(ent::full_report(V));
}
BENCHMARK(bm_full_report);

void bm_unitary_propagate(benchmark::State& state) {
  const auto preset = sim::scheme_preset(sim::Scheme::cm, 1.0e6, 0.8e6);
  const CovarianceMatrix vac(preset.config.modes,
                             Eigen::MatrixXd::Identity(6, 6));
  for (auto _ : state)
    benchmark::DoNotOptimize(sim::unitary_propagate(vac, preset.gen, 1e-7));
}
BENCHMARK(bm_unitary_propagate);

void bm_steady_state_output(benchmark::State& state) {
  const double g = 0.5 * sim::equal_coupling_threshold(sim::Scheme::cm);
  const auto preset = sim::scheme_preset(sim::Scheme::cm, g, g);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sim::steady_state_output(preset.config, preset.gen));
}
BENCHMARK(bm_steady_state_output);

void bm_sntj_fit(benchmark::State& state) {
  const double f = 4.20e9, gain = 8.3e7, temp = 0.037, t_sys = 3.4;
  cal::SntjSweep sweep;
  sweep.label = "m1";
  sweep.frequency = f;
  const double hf = phys::h * f;
  for (int k = 0; k < 41; ++k) {
    const double v = -4.0e-4 + 8.0e-4 * k / 40.0;
    const double ev = phys::e * v;
    const auto cth = [](double x) {
      return std::abs(x) > 20.0 ? (x > 0.0 ? 1.0 : -1.0) : 1.0 / std::tanh(x);
    };
    const double q = ((ev + hf) * cth((ev + hf) / (2 * phys::k_B * temp)) +
                      (ev - hf) * cth((ev - hf) / (2 * phys::k_B * temp))) /
                     (4 * phys::k_B);
    sweep.bias_v.push_back(v);
    sweep.noise.push_back(gain * (t_sys + q));
  }
  for (auto _ : state) benchmark::DoNotOptimize(cal::sntj_fit(sweep, f));
}
BENCHMARK(bm_sntj_fit);

}  // namespace

BENCHMARK_MAIN();
