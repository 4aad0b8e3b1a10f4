#include <ddc/pipeline.hpp>

#include <benchmark/benchmark.h>

using namespace ddc;

namespace {

ExperimentConfig bench_cfg(double delta, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.n = 3;
    cfg.m = 2;
    cfg.l = 4;
    cfg.s0 = 0.5;
    cfg.delta = delta;
    cfg.seed = seed;
    return cfg;
}

DescriptorData make_descriptor(double delta, std::uint64_t seed) {
    PlantModel plant = example_plant();
    ExperimentConfig cfg = bench_cfg(delta, seed);
    ExperimentData data = run_experiments(plant, cfg, RngStream(seed));
    return build_descriptor(data.agg1, data.agg2, cfg);
}

void BM_RunExperiments(benchmark::State& state) {
    PlantModel plant = example_plant();
    ExperimentConfig cfg = bench_cfg(0.2, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        ExperimentData data = run_experiments(plant, cfg, RngStream(seed++));
        benchmark::DoNotOptimize(data.agg1.N);
    }
}
BENCHMARK(BM_RunExperiments);

void BM_BuildDescriptor(benchmark::State& state) {
    PlantModel plant = example_plant();
    ExperimentConfig cfg = bench_cfg(0.2, 2);
    ExperimentData data = run_experiments(plant, cfg, RngStream(2));
    for (auto _ : state) {
        DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
        benchmark::DoNotOptimize(d.Ed);
    }
}
BENCHMARK(BM_BuildDescriptor);

void BM_AssembleRobustLmi(benchmark::State& state) {
    AugmentedDescriptor aug = augment(make_descriptor(0.2, 3));
    for (auto _ : state) {
        AssembledLmi assembled = assemble_robust_lmi(aug);
        benchmark::DoNotOptimize(assembled.lmi);
    }
}
BENCHMARK(BM_AssembleRobustLmi);

void BM_SolveRobustLmi(benchmark::State& state) {
    DescriptorData d = make_descriptor(0.2, 4);
    for (auto _ : state) {
        SynthesisResult res = synth_robust(d);
        benchmark::DoNotOptimize(res.status);
    }
}
BENCHMARK(BM_SolveRobustLmi);

void BM_SolveHinfLmi(benchmark::State& state) {
    DescriptorData d = make_descriptor(0.2, 5);
    for (auto _ : state) {
        SynthesisResult res = synth_hinf(d, 0.5);
        benchmark::DoNotOptimize(res.status);
    }
}
BENCHMARK(BM_SolveHinfLmi);

void BM_HinfNorm(benchmark::State& state) {
    PlantModel plant = example_plant();
    Mat F{{0.3815, -0.6629, -0.5368}, {-0.1548, 0.6346, 1.2579}};
    for (auto _ : state) benchmark::DoNotOptimize(hinf_norm(plant, F));
}
BENCHMARK(BM_HinfNorm);

void BM_SimulateClosedLoop(benchmark::State& state) {
    PlantModel plant = example_plant();
    Mat F{{0.3815, -0.6629, -0.5368}, {-0.1548, 0.6346, 1.2579}};
    NoiseProcess noise{0.2, 9};
    for (auto _ : state) {
        Trajectory traj = simulate_closed_loop(plant, F, Vec::Zero(3), noise, 1000);
        benchmark::DoNotOptimize(traj.states.back());
    }
}
BENCHMARK(BM_SimulateClosedLoop);

}  // namespace

BENCHMARK_MAIN();
