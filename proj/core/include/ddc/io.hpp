#pragma once

#include <ddc/descriptor.hpp>
#include <ddc/synthesis.hpp>
#include <ddc/verify.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ddc {

/// Generic named-matrix JSON persistence. Doubles are written in decimal with
/// enough digits that save-then-load reproduces every entry bit-exactly.
/// Non-finite entries are rejected on save; malformed documents raise
/// ParseError with file and field context on load.
void save_matrix_file(const std::filesystem::path& path, const std::map<std::string, Mat>& mats);
std::map<std::string, Mat> load_matrix_file(const std::filesystem::path& path);

void save_plant(const std::filesystem::path& path, const PlantModel& plant);
PlantModel load_plant(const std::filesystem::path& path);

struct ExperimentFileMeta {
    double s0 = 0.5;
    double delta = 0.0;
    int l = 4;
    std::uint64_t seed = 0;
};

/// Experiment files hold raw runs (states, inputs, outputs), the aggregates,
/// and the meta needed downstream. Noise records (the "unknown to the
/// controller" data) are written only when with_oracle is set.
void save_experiment1(const std::filesystem::path& path, const ExperimentRecord& record,
                      const Experiment1Aggregate& agg, const ExperimentFileMeta& meta,
                      bool with_oracle);
void save_experiment2(const std::filesystem::path& path, const ExperimentRecord& record,
                      const Experiment2Aggregate& agg, const ExperimentFileMeta& meta,
                      bool with_oracle);

struct LoadedExperiment1 {
    Experiment1Aggregate agg;
    ExperimentFileMeta meta;
    bool has_oracle = false;
};
struct LoadedExperiment2 {
    Experiment2Aggregate agg;
    ExperimentFileMeta meta;
    bool has_oracle = false;
};
LoadedExperiment1 load_experiment1(const std::filesystem::path& path);
LoadedExperiment2 load_experiment2(const std::filesystem::path& path);

void save_descriptor(const std::filesystem::path& path, const DescriptorData& d);
DescriptorData load_descriptor(const std::filesystem::path& path);

void save_controller(const std::filesystem::path& path, const ControllerGain& gain);
ControllerGain load_controller(const std::filesystem::path& path);

std::string report_to_json(const VerificationReport& report);

/// CSV with header k,x1..xn,u1..um,w1..wq,y1..yp and one row per step.
void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// CSV with header k,y1..yp (output sequence only).
void save_outputs_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace ddc
