#pragma once

#include <ddc/pipeline.hpp>

#include <doctest.h>

namespace ddct {

using ddc::Mat;
using ddc::Vec;

inline ddc::PlantModel bench_plant() { return ddc::example_plant(); }

// stable diagonal test plant with full input authority
inline ddc::PlantModel stable_plant() {
    ddc::PlantModel plant;
    plant.A = 0.5 * Mat::Identity(3, 3);
    plant.B = Mat::Identity(3, 3);
    plant.Bw = Mat::Identity(3, 3);
    plant.C = Mat{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    plant.D = Mat::Zero(2, 3);
    return plant;
}

inline Mat random_mat(ddc::RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = 2.0 * rng.next_uniform() - 1.0;
    return m;
}

inline Mat random_sym(ddc::RngStream& rng, Eigen::Index n) {
    Mat m = random_mat(rng, n, n);
    return 0.5 * (m + m.transpose());
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline ddc::ExperimentConfig bench_config(double delta, std::uint64_t seed = 0) {
    ddc::ExperimentConfig cfg;
    cfg.n = 3;
    cfg.m = 2;
    cfg.l = 4;
    cfg.s0 = 0.5;
    cfg.delta = delta;
    cfg.seed = seed;
    return cfg;
}

inline ddc::DescriptorData bench_descriptor(double delta, std::uint64_t seed) {
    ddc::PlantModel plant = bench_plant();
    ddc::ExperimentConfig cfg = bench_config(delta, seed);
    ddc::ExperimentData data = ddc::run_experiments(plant, cfg, ddc::RngStream(seed));
    return ddc::build_descriptor(data.agg1, data.agg2, cfg);
}

// gains reported in the benchmark study write-up; noise-realization dependent,
// used only for "is stabilizing" style checks
inline Mat reported_robust_gain() {
    return Mat{{0.3815, -0.6629, -0.5368}, {-0.1548, 0.6346, 1.2579}};
}
inline Mat reported_hinf_gain() {
    return Mat{{-0.1788, -0.4381, -0.3199}, {-0.2071, 0.2021, 0.9403}};
}

}  // namespace ddct
