#include <benchmark/benchmark.h>

#include "qtraj/climit.hpp"
#include "qtraj/specfun.hpp"
#include "qtraj/trajectory.hpp"

namespace {

void BM_AiryScaled(benchmark::State& state) {
    const double z = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(qtraj::specfun::airy_scaled(z));
}
BENCHMARK(BM_AiryScaled)->Arg(-50)->Arg(-5)->Arg(0)->Arg(5)->Arg(50);

qtraj::PhysicalSetup setup_for(int which) {
    qtraj::PhysicalSetup s;
    s.hbar = 1e-2;
    if (which == 1) s.potential = qtraj::StepPotential{1.0};
    if (which == 2) s.potential = qtraj::LinearPotential{1.0};
    return s;
}

void BM_Evaluate(benchmark::State& state) {
    const qtraj::PhysicalSetup s = setup_for(static_cast<int>(state.range(0)));
    const qtraj::Microstate ms{2.0, 1.0, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(qtraj::evaluate(s, ms, 0.3));
}
BENCHMARK(BM_Evaluate)->DenseRange(0, 2);

void BM_CycleAverage(benchmark::State& state) {
    const qtraj::PhysicalSetup s = setup_for(0);
    const qtraj::Microstate ms{2.0, 1.0, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(qtraj::cycle_average(s, ms, 0.3));
}
BENCHMARK(BM_CycleAverage);

}  // namespace

BENCHMARK_MAIN();
