// Serial reference vs OpenMP for the four fan-out kernels.

#include <benchmark/benchmark.h>

#include "wtgfm/curtailment.hpp"
#include "wtgfm/gaindesign.hpp"
#include "wtgfm/parallel.hpp"
#include "wtgfm/scenario.hpp"

using namespace wtgfm;

namespace {

const TurbineParams kTurbine{};
const CpSurface& surface() {
  static const CpSurface s = default_surface(kTurbine);
  return s;
}

std::vector<double> fine_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = a + (b - a) * k / (n - 1);
  return g;
}

void BM_DeloadTable(benchmark::State& st) {
  const auto v = fine_grid(4.0, 14.0, 81);
  const auto e = fine_grid(0.7, 1.0, 31);
  const bool par = st.range(0) != 0;
  for (auto _ : st) {
    auto t = par ? build_table(kTurbine, surface(), v, e) : build_table_serial(kTurbine, surface(), v, e);
    benchmark::DoNotOptimize(t.cells().data());
  }
  st.SetItemsProcessed(st.iterations() * v.size() * e.size());
}

void BM_DroopMap(benchmark::State& st) {
  const auto v = fine_grid(5.0, 14.0, 46);
  const auto e = fine_grid(0.8, 1.0, 21);
  const auto spec = DesignSpec::fig7();
  const bool par = st.range(0) != 0;
  for (auto _ : st) {
    auto m = par ? droop_map(kTurbine, surface(), v, e, spec) : droop_map_serial(kTurbine, surface(), v, e, spec);
    benchmark::DoNotOptimize(m.cells.data());
  }
  st.SetItemsProcessed(st.iterations() * v.size() * e.size());
}

void BM_StabilitySweep(benchmark::State& st) {
  const bool par = st.range(0) != 0;
  for (auto _ : st) {
    auto s = par ? stability_sweep(400, 7) : stability_sweep_serial(400, 7);
    benchmark::DoNotOptimize(s.data());
  }
  st.SetItemsProcessed(st.iterations() * 400);
}

void BM_ScenarioBatch(benchmark::State& st) {
  Config base = parse_config(nlohmann::json::object());
  base.scenario.duration = 10.0;
  base.scenario.events = {{5.0, 0.4}};
  std::vector<Config> cfgs;
  for (double v : {8.0, 10.0, 12.0}) {
    for (Mode m : {Mode::GflMppt, Mode::GfmMppt, Mode::GfmFr}) {
      Config c = base;
      c.scenario.v_w = v;
      c.scenario.mode = m;
      cfgs.push_back(c);
    }
  }
  const bool par = st.range(0) != 0;
  for (auto _ : st) {
    auto r = par ? run_batch(cfgs) : run_batch_serial(cfgs);
    benchmark::DoNotOptimize(r.data());
  }
  st.SetItemsProcessed(st.iterations() * cfgs.size());
}

}  // namespace

BENCHMARK(BM_DeloadTable)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DroopMap)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabilitySweep)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScenarioBatch)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
