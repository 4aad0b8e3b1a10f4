#pragma once

#include <ddc/lmi.hpp>

#include <optional>
#include <string>

namespace ddc {

inline constexpr double kDefaultMargin = 1e-6;

struct ControllerGain {
    Mat F;  // m x n
    std::string method;           // "robust" or "hinf"
    std::optional<double> gamma;  // hinf only
    double eps = 0.0;
    std::vector<double> margins;  // per-LMI lambda_max at the certificate
    std::string seed_provenance;
};

enum class SynthesisStatus { Success, Infeasible, ExtractionSingular, NumericalFailure };

struct SynthesisResult {
    SynthesisStatus status = SynthesisStatus::NumericalFailure;
    std::optional<ControllerGain> gain;
    std::optional<LmiSolution> certificate;
    int iterations = 0;

    bool ok() const { return status == SynthesisStatus::Success; }
};

/// Robust state-feedback synthesis from data: solves the data-based robust
/// LMI and extracts F = Z K^-1. A reciprocal condition number of K below
/// 1e-10 is reported as ExtractionSingular (counted as "no controller found").
SynthesisResult synth_robust(const DescriptorData& d, double margin = kDefaultMargin);

/// H-infinity state-feedback synthesis from data at attenuation level gamma:
/// solves the data-based H-infinity LMI and extracts F = K1 P1^-1.
SynthesisResult synth_hinf(const DescriptorData& d, double gamma,
                           double margin = kDefaultMargin);

}  // namespace ddc
