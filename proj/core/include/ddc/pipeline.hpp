#pragma once

#include <ddc/io.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddc {

/// Configuration shared by all CLI subcommands. Defaults reproduce the
/// bundled benchmark study: s0 = 0.5, l = 4, delta = 0.2, gamma = 0.5.
struct BenchConfig {
    std::string plant_path;  // empty -> bundled example plant
    double s0 = 0.5;
    int l = 4;
    double delta = 0.2;
    double gamma = 0.5;
    std::vector<double> noise_levels = {0.5, 1.0, 1.5, 2.0, 2.2, 2.4};
    int trials = 100;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    double cond_threshold = 1e-8;
    int max_retries = 10;
    double margin = 1e-6;
    int threads = 0;  // 0 = hardware concurrency
    bool with_oracle = false;
    std::string synth_methods = "both";  // pipeline: robust | hinf | both

    /// Overlay fields present in a JSON config file onto this config.
    void load_file(const std::filesystem::path& path);

    PlantModel resolve_plant() const;
    ExperimentConfig experiment_config(const PlantModel& plant) const;
};

/// The bundled example plant: an open-loop-unstable 3-state system with two
/// inputs, two outputs and identity noise and feedthrough channels.
PlantModel example_plant();

struct MonteCarloRow {
    double delta = 0.0;
    int trials = 0;
    int verified_success_count = 0;  // gain found and rho(A+BF) < 1 on the true plant
    int lmi_feasible_count = 0;      // solver produced a certificate
    double percentage = 0.0;         // 100 * verified / trials
};

/// Monte Carlo study across config.noise_levels: per-trial seeds derive from
/// (seed, level, trial); trials run concurrently and deterministically.
std::vector<MonteCarloRow> run_montecarlo(const BenchConfig& config, const PlantModel& plant);

// Subcommand bodies (the CLI is a thin wrapper). Each returns a process exit
// code; configuration and I/O errors escape as exceptions.
int cmd_gen(const BenchConfig& config);
int cmd_build_descriptor(const BenchConfig& config, const std::filesystem::path& data_dir,
                         const std::filesystem::path& out_file);
int cmd_synth(const BenchConfig& config, const std::filesystem::path& descriptor_file,
              const std::string& method, const std::filesystem::path& out_file,
              const std::string& dump_lmi_path = {});
int cmd_verify(const BenchConfig& config, const std::filesystem::path& plant_file,
               const std::filesystem::path& controller_file, std::optional<double> gamma);
int cmd_simulate(const BenchConfig& config, const std::filesystem::path& controller_file,
                 int steps, const std::filesystem::path& out_file);
int cmd_montecarlo(const BenchConfig& config);
int cmd_figure1(const BenchConfig& config);
int cmd_pipeline(const BenchConfig& config);

}  // namespace ddc
