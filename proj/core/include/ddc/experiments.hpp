#pragma once

#include <ddc/plant.hpp>

#include <vector>

namespace ddc {

struct ExperimentConfig {
    int n = 0;  // plant state dimension
    int m = 0;  // plant input dimension
    int l = 4;  // steps per sub-experiment
    double s0 = 0.5;
    double delta = 0.2;
    double cond_threshold = 1e-8;
    int max_retries = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Raw record of one experiment: one trajectory per sub-experiment.
struct ExperimentRecord {
    std::vector<Trajectory> runs;
};

/// Column-wise data matrices of the first experiment. Column i comes from
/// sub-experiment i (zero-sum inputs, randomized initial state):
///   N(:,i) = (s0-1) * sum_{k<l} x_k + x_0 - x_l
///   M(:,i) = X(:,i) = sum_{k<l} x_k
///   V(:,i) = sum_{1<=k<=l} x_k
///   T(:,i) = (s0-1) * sum_{1<=k<=l} x_k + s0 (x_0 - x_l)
///   Y(:,i) = sum_{k<l} y_k
struct Experiment1Aggregate {
    Mat N, M, V, T, X;  // n x n
    Mat Y;              // p x n
    Mat oracle_W;       // q x n, column i = sum_{k<l} w_k(i); simulator-side, test-only
};

/// Second experiment: constant unit input e_i per sub-experiment; column i
/// holds the last two states and the last recorded output.
struct Experiment2Aggregate {
    Mat R0, R1, Xp;  // n x m
    Mat Yp;          // p x m
    Mat oracle_W0;   // q x m, column i = w_{l-1}(i); simulator-side, test-only
};

/// Zero-sum input sequence: l-1 random draws in [0,1)^m plus the negated
/// partial sum (a single zero vector when l == 1).
std::vector<Vec> design_exp1_inputs(int m, int l, RngStream& rng);

ExperimentRecord run_experiment1(const PlantModel& plant, const ExperimentConfig& config,
                                 const RngStream& stream);
Experiment1Aggregate aggregate_exp1(const ExperimentRecord& record, double s0);

ExperimentRecord run_experiment2(const PlantModel& plant, const ExperimentConfig& config,
                                 const RngStream& stream);
Experiment2Aggregate aggregate_exp2(const ExperimentRecord& record);

enum class ConditioningCheck { Ok, Retry };

/// Ok iff the reciprocal condition numbers of N, T and X all exceed the
/// threshold.
ConditioningCheck check_conditioning(const Experiment1Aggregate& agg, double threshold);

/// Both experiments plus aggregation, rerunning everything with a fresh
/// sub-seed while the conditioning check fails. Throws ConditioningError
/// when max_retries is exhausted.
struct ExperimentData {
    ExperimentRecord record1;
    ExperimentRecord record2;
    Experiment1Aggregate agg1;
    Experiment2Aggregate agg2;
    int retries_used = 0;
};

ExperimentData run_experiments(const PlantModel& plant, const ExperimentConfig& config,
                               const RngStream& stream);

}  // namespace ddc
