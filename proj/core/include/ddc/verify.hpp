#pragma once

#include <ddc/plant.hpp>
#include <ddc/synthesis.hpp>

#include <optional>
#include <vector>

namespace ddc {

/// Maximum eigenvalue modulus of a square matrix (dense eigensolver).
double spectral_radius(const Mat& m);

/// Ground-truth closed-loop H-infinity norm
///   sup_{|z|=1} sigma_max((C + D F)(z I - A - B F)^-1 Bw)
/// by a 512-point frequency grid plus golden-section refinement around the
/// grid maximum. Returns +inf when rho(A + B F) >= 1.
double hinf_norm(const PlantModel& plant, const Mat& F, double tol = 1e-6);

struct EnergyRatioResult {
    std::vector<double> ratios;  // sum ||y||^2 / sum ||w||^2 per trial
    int skipped_trials = 0;      // trials with all-zero noise energy
};

/// Closed-loop energy gain from zero initial state over L steps per trial.
EnergyRatioResult empirical_energy_ratio(const PlantModel& plant, const Mat& F,
                                         const NoiseProcess& noise, int L, int trials);

struct VerificationReport {
    double spectral_radius = 0.0;
    bool stable = false;
    double hinf_norm = 0.0;  // +inf when unstable
    std::vector<double> empirical_energy_ratios;
    std::optional<double> gamma_target;
    int skipped_trials = 0;

    /// Stable, and when gamma_target is set: hinf_norm <= gamma + 1e-6 and
    /// every energy ratio <= gamma^2 * 1.05.
    bool pass() const;
};

struct VerifyOptions {
    int energy_horizon = 10000;
    int energy_trials = 5;
    double noise_delta = 0.2;
    std::uint64_t noise_seed = 0;
    double norm_tol = 1e-6;
};

VerificationReport verify_controller(const PlantModel& plant, const Mat& F,
                                     std::optional<double> gamma_target,
                                     const VerifyOptions& options = {});

}  // namespace ddc
