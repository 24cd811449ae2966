#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "otdro/dro.hpp"
#include "otdro/geometry.hpp"
#include "otdro/reference.hpp"
#include "otdro/synthetic.hpp"

namespace {

using namespace otdro;

struct Instance {
    Dataset data;
    std::vector<double> forecasts;
    PolyhedralSupport support;
};

const Instance& instance() {
    static const Instance inst = [] {
        Instance i;
        SyntheticConfig c;
        c.ensemble_size = 4;
        i.data = generate_synthetic(c, 1);
        for (const auto& f : i.data.forecasts) i.forecasts.push_back(f.f_mean);
        i.support = build_support_xi(i.data.records);
        return i;
    }();
    return inst;
}

EmpiricalDistribution reference(std::size_t max_samples) {
    const auto& inst = instance();
    ReferenceOptions opt;
    opt.max_samples = max_samples;
    return build_reference({inst.forecasts, inst.data.records}, 40.0, opt);
}

void BM_BuildReference(benchmark::State& state) {
    const auto& inst = instance();
    ReferenceOptions opt;
    opt.max_samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_reference({inst.forecasts, inst.data.records}, 40.0, opt));
}
BENCHMARK(BM_BuildReference)->Arg(100)->Arg(500)->Arg(3000);

void BM_SolveStructured(benchmark::State& state) {
    const auto ref = reference(static_cast<std::size_t>(state.range(0)));
    const auto& sup = instance().support;
    for (auto _ : state) benchmark::DoNotOptimize(solve_nomination(ref, sup, 1.0, default_bounds(sup)));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveStructured)->RangeMultiplier(4)->Range(8, 2048)->Complexity();

void BM_SolveSimplex(benchmark::State& state) {
    const auto ref = reference(static_cast<std::size_t>(state.range(0)));
    const auto& sup = instance().support;
    SolveOptions o;
    o.backend = Backend::simplex;
    for (auto _ : state) benchmark::DoNotOptimize(solve_nomination(ref, sup, 1.0, default_bounds(sup), o));
}
BENCHMARK(BM_SolveSimplex)->Arg(2)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_AssembleLp(benchmark::State& state) {
    const auto ref = reference(static_cast<std::size_t>(state.range(0)));
    const auto& sup = instance().support;
    const auto problem = make_problem(ref, sup, 1.0, default_bounds(sup));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_lp(problem));
}
BENCHMARK(BM_AssembleLp)->Arg(10)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
