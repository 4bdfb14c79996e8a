// Serial vs OpenMP parameter sweep over the engagement metric.
#include <benchmark/benchmark.h>

#include <vector>

#include "eaclutch/dynamics/sweep.hpp"

using namespace eaclutch;

namespace {

std::vector<SweepAxis> grid() {
    return {{"voltage", {125, 150, 175, 200, 225, 250, 275, 300}}, {"substrate_width", {1e-3, 2e-3, 3e-3, 4e-3}}};
}

void run(benchmark::State& state, bool parallel) {
    const ClutchConfig c;
    const auto axes = grid();
    SweepOptions o;
    o.parallel = parallel;
    o.threads = parallel ? static_cast<int>(state.range(0)) : 1;
    o.sim.kernel = relaxation_kernel_for(c.dielectric.alpha);  // table build kept out of the timing
    for (auto _ : state) {
        SweepTable t = parameter_sweep(c, axes, SweepMetric::engage, o);
        benchmark::DoNotOptimize(t.rows.data());
    }
    state.counters["cells"] = 32;
}

void BM_SweepSerial(benchmark::State& state) { run(state, false); }
void BM_SweepOpenMP(benchmark::State& state) { run(state, true); }

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepOpenMP)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
