#include "helpers.hpp"

#include <ddc/descriptor.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

using namespace ddc;
using ddct::bench_config;
using ddct::bench_plant;
using ddct::max_abs;

TEST_CASE("build_descriptor: noiseless data collapses to the true descriptor") {
    PlantModel plant = bench_plant();
    ExperimentConfig cfg = bench_config(0.0);
    ExperimentData data = run_experiments(plant, cfg, RngStream(5));
    DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
    TrueDescriptor truth = true_descriptor(plant, cfg.s0);

    CHECK(max_abs(d.Ed - truth.E) <= 1e-8);
    CHECK(max_abs(d.Ad - truth.A) <= 1e-8);
    CHECK(max_abs(d.Bd - truth.B) <= 1e-8);
    CHECK(max_abs(d.Cd - plant.C) <= 1e-8);
    CHECK(max_abs(d.Dd - plant.D) <= 1e-8);
}

TEST_CASE("build_descriptor: output matrices are exact regardless of noise") {
    PlantModel plant = bench_plant();
    for (std::uint64_t seed : {2ull, 7ull, 11ull}) {
        ExperimentConfig cfg = bench_config(0.2, seed);
        ExperimentData data = run_experiments(plant, cfg, RngStream(seed));
        DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
        CHECK(max_abs(d.Cd - plant.C) <= 1e-8);
        CHECK(max_abs(d.Dd - plant.D) <= 1e-8);
    }
}

TEST_CASE("build_descriptor: uncertainty shaper scale") {
    PlantModel plant = bench_plant();
    ExperimentConfig cfg = bench_config(0.2, 3);
    ExperimentData data = run_experiments(plant, cfg, RngStream(3));
    DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);

    // Ke = -l sqrt(delta n) N^-1 with l = 4, delta = 0.2, n = 3
    Mat Ninv = Eigen::PartialPivLU<Mat>(data.agg1.N).solve(Mat::Identity(3, 3));
    CHECK(max_abs(d.Ke + 4.0 * std::sqrt(0.6) * Ninv) <= 1e-12);
}

TEST_CASE("build_descriptor: singular data matrix is a conditioning error") {
    PlantModel plant = bench_plant();
    ExperimentConfig cfg = bench_config(0.2, 3);
    ExperimentData data = run_experiments(plant, cfg, RngStream(3));
    data.agg1.N.col(0).setZero();
    CHECK_THROWS_AS(build_descriptor(data.agg1, data.agg2, cfg), ConditioningError);
}

TEST_CASE("residual_report: exact identities with the recorded noise") {
    PlantModel plant = bench_plant();
    for (double delta : {0.0, 0.2}) {
        ExperimentConfig cfg = bench_config(delta, 13);
        ExperimentData data = run_experiments(plant, cfg, RngStream(13));
        DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
        ResidualReport r = residual_report(d, plant, data.agg1.oracle_W, data.agg2.oracle_W0);
        if (delta == 0.0)
            CHECK(r.max_residual() <= 1e-10);
        else
            CHECK(r.max_residual() <= 1e-8);
    }
}

TEST_CASE("residual_report: sensitive to a perturbed nominal matrix") {
    PlantModel plant = bench_plant();
    ExperimentConfig cfg = bench_config(0.2, 13);
    ExperimentData data = run_experiments(plant, cfg, RngStream(13));
    DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
    d.Ed(0, 0) += 1e-3;
    ResidualReport r = residual_report(d, plant, data.agg1.oracle_W, data.agg2.oracle_W0);
    CHECK(r.e_residual >= 1e-4);
}

TEST_CASE("descriptor normalization: the implied uncertainty is inside the unit ball") {
    PlantModel plant = bench_plant();
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        ExperimentConfig cfg = bench_config(0.2, seed);
        ExperimentData data = run_experiments(plant, cfg, RngStream(seed));
        Mat Df = data.agg1.oracle_W / (cfg.l * std::sqrt(cfg.delta * 3));
        Eigen::SelfAdjointEigenSolver<Mat> es(Df * Df.transpose(), Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-9);
    }
}

TEST_CASE("augment: block layout") {
    DescriptorData d;
    d.n = 2;
    d.m = 1;
    d.Ed = Mat::Identity(2, 2);
    d.Ad = Mat::Identity(2, 2);
    d.Bd = Mat::Zero(2, 1);
    d.Cd = Mat{{1.0, 0.0}};
    d.Dd = Mat::Zero(1, 1);
    d.Ke = Mat{{1.0, 2.0}, {3.0, 4.0}};
    d.Ka = Mat{{5.0, 6.0}, {7.0, 8.0}};
    d.Kb = Mat{{9.0}, {10.0}};

    AugmentedDescriptor a = augment(d);
    Mat expected_A{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, -1, 0}, {0, 1, 0, -1}};
    CHECK(a.Ahat == expected_A);
    CHECK(a.Ehat.topLeftCorner(2, 2) == Mat::Identity(2, 2));
    CHECK(a.Ehat.bottomRows(2).isZero(0.0));
    CHECK(a.Ehat.topRightCorner(2, 2).isZero(0.0));
    // Ehat has rank n
    CHECK(Eigen::FullPivLU<Mat>(a.Ehat).rank() == 2);
    CHECK(a.Ka_hat.leftCols(2) == d.Ka);
    CHECK(a.Ka_hat.rightCols(2) == Mat(-d.Ke));
    CHECK(a.Kb_hat == d.Kb);
    CHECK(a.Chat.leftCols(2) == d.Cd);
    CHECK(a.Chat.rightCols(2).isZero(0.0));
}
