// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "vit/kernels.hpp"
#include "vit/pulse.hpp"
#include "vit/recipes.hpp"
#include "vit/synth.hpp"

using namespace vit;
using units::mhz_to_angular;

namespace {

SpectrumModel regime_model(int standing_wave_nodes = 64, int jitter_nodes = 16) {
  io::RunConfig cfg = recipes::with_all_corrections(io::default_run_config());
  cfg.corrections.standing_wave_nodes = standing_wave_nodes;
  cfg.corrections.jitter->nodes = jitter_nodes;
  return SpectrumModel(cfg.physics, 3.4, cfg.corrections);
}

std::vector<double> probe_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = mhz_to_angular(-8.0 + 16.0 * i / (n - 1));
  return g;
}

template <auto Kernel>
void BM_Spectrum(benchmark::State& state) {
  const SpectrumModel m = regime_model();
  const auto grid = probe_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m, grid, mhz_to_angular(0.5)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Generate>
void BM_Scan(benchmark::State& state) {
  const io::RunConfig cfg = io::default_run_config();
  ModelOptions o;
  o.standing_wave = true;
  const SpectrumModel m(cfg.physics, 5.0, o);
  const ScanPlan plan = recipes::reference_scan_plan(
      cfg, {mhz_to_angular(0.5), mhz_to_angular(-2.2), mhz_to_angular(2.8)}, probe_grid(161), 7);
  for (auto _ : state) benchmark::DoNotOptimize(Generate(m, plan));
}

template <auto Propagate>
void BM_Incoherent(benchmark::State& state) {
  const SpectrumModel m = regime_model(16, 4);
  const auto branches = m.branches(0.0);
  GridConfig g;
  g.samples = static_cast<std::size_t>(state.range(0));
  const SampledPulse p = make_gaussian_pulse(PulseSpec{}, g);
  for (auto _ : state) benchmark::DoNotOptimize(Propagate(p, branches));
}

}  // namespace

BENCHMARK(BM_Spectrum<kernels::evaluate_spectrum_serial>)->Name("spectrum/serial")->Arg(64)->Arg(512);
BENCHMARK(BM_Spectrum<kernels::evaluate_spectrum_parallel>)->Name("spectrum/parallel")->Arg(64)->Arg(512);
BENCHMARK(BM_Scan<generate_scan_serial>)->Name("scan/serial");
BENCHMARK(BM_Scan<generate_scan_parallel>)->Name("scan/parallel");
BENCHMARK(BM_Incoherent<propagate_incoherent_serial>)->Name("incoherent/serial")->Arg(1 << 14);
BENCHMARK(BM_Incoherent<propagate_incoherent_parallel>)->Name("incoherent/parallel")->Arg(1 << 14);

BENCHMARK_MAIN();
