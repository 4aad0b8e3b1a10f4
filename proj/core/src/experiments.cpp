#include <ddc/experiments.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ddc {
namespace {

// child ids for stream derivation; every (attempt, experiment, sub-experiment)
// gets an independent stream so reruns and threads never share draws
enum StreamId : std::uint64_t { kInputs = 0, kInitialState = 1, kNoise = 2 };

Vec column_sum(const std::vector<Vec>& vs, int first, int last_exclusive) {
    Vec acc = Vec::Zero(vs.front().size());
    for (int k = first; k < last_exclusive; ++k) acc += vs[k];
    return acc;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("ExperimentConfig: n, m must be positive");
    if (m > n) throw std::invalid_argument("ExperimentConfig: m > n is not supported");
    if (l < 1) throw std::invalid_argument("ExperimentConfig: l must be >= 1");
    if (delta < 0.0) throw std::invalid_argument("ExperimentConfig: delta must be >= 0");
    if (!(cond_threshold > 0.0 && cond_threshold < 1.0))
        throw std::invalid_argument("ExperimentConfig: cond_threshold must be in (0, 1)");
    if (max_retries < 1) throw std::invalid_argument("ExperimentConfig: max_retries must be >= 1");
}

std::vector<Vec> design_exp1_inputs(int m, int l, RngStream& rng) {
    if (m < 1 || l < 1) throw std::invalid_argument("design_exp1_inputs: m, l must be >= 1");
    std::vector<Vec> inputs;
    inputs.reserve(l);
    if (l == 1) {
        inputs.push_back(Vec::Zero(m));
        return inputs;
    }
    Vec partial = Vec::Zero(m);
    for (int k = 0; k + 1 < l; ++k) {
        Vec u = rng.uniform_vector(m);
        partial += u;
        inputs.push_back(std::move(u));
    }
    inputs.push_back(-partial);
    return inputs;
}

ExperimentRecord run_experiment1(const PlantModel& plant, const ExperimentConfig& config,
                                 const RngStream& stream) {
    plant.validate();
    config.validate();
    if (config.n != plant.n() || config.m != plant.m())
        throw std::invalid_argument("run_experiment1: config dims inconsistent with plant");

    ExperimentRecord record;
    record.runs.reserve(plant.n());
    for (int i = 0; i < plant.n(); ++i) {
        RngStream sub = stream.child(i);
        RngStream input_rng = sub.child(kInputs);
        RngStream init_rng = sub.child(kInitialState);
        auto inputs = design_exp1_inputs(plant.m(), config.l, input_rng);
        Vec x0 = init_rng.uniform_vector(plant.n());
        NoiseProcess noise{config.delta, sub.child_seed(kNoise)};
        record.runs.push_back(simulate(plant, x0, inputs, noise));
    }
    return record;
}

Experiment1Aggregate aggregate_exp1(const ExperimentRecord& record, double s0) {
    if (record.runs.empty()) throw std::invalid_argument("aggregate_exp1: empty record");
    const int n = static_cast<int>(record.runs.front().states.front().size());
    if (static_cast<int>(record.runs.size()) != n)
        throw std::invalid_argument("aggregate_exp1: expected exactly n sub-experiments");
    const int l = record.runs.front().length();
    const int p = static_cast<int>(record.runs.front().outputs.front().size());
    const int q = static_cast<int>(record.runs.front().noises.front().size());

    Experiment1Aggregate agg;
    agg.N = Mat(n, n);
    agg.M = Mat(n, n);
    agg.V = Mat(n, n);
    agg.T = Mat(n, n);
    agg.X = Mat(n, n);
    agg.Y = Mat(p, n);
    agg.oracle_W = Mat(q, n);

    for (int i = 0; i < n; ++i) {
        const Trajectory& run = record.runs[i];
        if (run.length() != l) throw std::invalid_argument("aggregate_exp1: ragged record");
        Vec s_head = column_sum(run.states, 0, l);      // sum_{k=0}^{l-1} x_k
        Vec s_tail = column_sum(run.states, 1, l + 1);  // sum_{k=1}^{l} x_k
        Vec edge = run.states.front() - run.states.back();
        agg.N.col(i) = (s0 - 1.0) * s_head + edge;
        agg.M.col(i) = s_head;
        agg.V.col(i) = s_tail;
        agg.T.col(i) = (s0 - 1.0) * s_tail + s0 * edge;
        agg.X.col(i) = s_head;
        agg.Y.col(i) = column_sum(run.outputs, 0, l);
        agg.oracle_W.col(i) = column_sum(run.noises, 0, l);
    }
    return agg;
}

ExperimentRecord run_experiment2(const PlantModel& plant, const ExperimentConfig& config,
                                 const RngStream& stream) {
    plant.validate();
    config.validate();
    if (config.n != plant.n() || config.m != plant.m())
        throw std::invalid_argument("run_experiment2: config dims inconsistent with plant");

    ExperimentRecord record;
    record.runs.reserve(plant.m());
    for (int i = 0; i < plant.m(); ++i) {
        RngStream sub = stream.child(i);
        Vec unit = Vec::Unit(plant.m(), i);
        std::vector<Vec> inputs(config.l, unit);
        Vec x0 = sub.child(kInitialState).uniform_vector(plant.n());
        NoiseProcess noise{config.delta, sub.child_seed(kNoise)};
        record.runs.push_back(simulate(plant, x0, inputs, noise));
    }
    return record;
}

Experiment2Aggregate aggregate_exp2(const ExperimentRecord& record) {
    if (record.runs.empty()) throw std::invalid_argument("aggregate_exp2: empty record");
    const int m = static_cast<int>(record.runs.size());
    const int n = static_cast<int>(record.runs.front().states.front().size());
    const int l = record.runs.front().length();
    const int p = static_cast<int>(record.runs.front().outputs.front().size());
    const int q = static_cast<int>(record.runs.front().noises.front().size());

    Experiment2Aggregate agg;
    agg.R0 = Mat(n, m);
    agg.R1 = Mat(n, m);
    agg.Xp = Mat(n, m);
    agg.Yp = Mat(p, m);
    agg.oracle_W0 = Mat(q, m);

    for (int i = 0; i < m; ++i) {
        const Trajectory& run = record.runs[i];
        if (run.length() != l) throw std::invalid_argument("aggregate_exp2: ragged record");
        agg.R1.col(i) = run.states[l];
        agg.R0.col(i) = run.states[l - 1];
        agg.Xp.col(i) = run.states[l - 1];
        agg.Yp.col(i) = run.outputs[l - 1];
        agg.oracle_W0.col(i) = run.noises[l - 1];
    }
    return agg;
}

ConditioningCheck check_conditioning(const Experiment1Aggregate& agg, double threshold) {
    // sigma_min is measured against max(1, sigma_max) rather than sigma_max
    // alone: a matrix that is numerically zero (a degenerate shift makes N
    // vanish) must fail even though its singular values are all comparable
    for (const Mat* m : {&agg.N, &agg.T, &agg.X}) {
        Eigen::JacobiSVD<Mat> svd(*m);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= threshold * std::max(1.0, sv(0)))
            return ConditioningCheck::Retry;
    }
    return ConditioningCheck::Ok;
}

ExperimentData run_experiments(const PlantModel& plant, const ExperimentConfig& config,
                               const RngStream& stream) {
    config.validate();
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
        RngStream attempt_stream = stream.child(attempt);
        ExperimentData data;
        data.record1 = run_experiment1(plant, config, attempt_stream.child(0));
        data.agg1 = aggregate_exp1(data.record1, config.s0);
        if (check_conditioning(data.agg1, config.cond_threshold) != ConditioningCheck::Ok)
            continue;
        data.record2 = run_experiment2(plant, config, attempt_stream.child(1));
        data.agg2 = aggregate_exp2(data.record2);
        data.retries_used = attempt;
        return data;
    }
    throw ConditioningError("run_experiments: conditioning check failed after " +
                            std::to_string(config.max_retries) + " attempts");
}

}  // namespace ddc
