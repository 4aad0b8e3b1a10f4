#include <ddc/synthesis.hpp>

#include <Eigen/LU>

#include <stdexcept>

namespace ddc {
namespace {

SynthesisStatus map_status(SolveStatus s) {
    switch (s) {
        case SolveStatus::Success: return SynthesisStatus::Success;
        case SolveStatus::Infeasible: return SynthesisStatus::Infeasible;
        case SolveStatus::NumericalFailure: return SynthesisStatus::NumericalFailure;
    }
    return SynthesisStatus::NumericalFailure;
}

// F = numerator * denominator^-1 via LU on the transposed system
Mat right_divide(const Mat& numerator, const Mat& denominator) {
    return Eigen::PartialPivLU<Mat>(denominator.transpose())
        .solve(numerator.transpose())
        .transpose();
}

}  // namespace

SynthesisResult synth_robust(const DescriptorData& d, double margin) {
    AssembledLmi assembled = assemble_robust_lmi(augment(d));
    SolveResult solve = solve_feasibility({assembled.lmi}, assembled.variables, margin);

    SynthesisResult out;
    out.iterations = solve.iterations;
    if (solve.status != SolveStatus::Success) {
        out.status = map_status(solve.status);
        return out;
    }
    const LmiSolution& sol = *solve.solution;
    const Mat& K = sol.assignment.at("K");
    if (reciprocal_condition(K) < 1e-10) {
        out.status = SynthesisStatus::ExtractionSingular;
        out.certificate = sol;
        return out;
    }
    ControllerGain gain;
    gain.F = right_divide(sol.assignment.at("Z"), K);
    gain.method = "robust";
    gain.eps = sol.eps;
    gain.margins = sol.lmi_lambda_max;
    out.status = SynthesisStatus::Success;
    out.gain = std::move(gain);
    out.certificate = sol;
    return out;
}

SynthesisResult synth_hinf(const DescriptorData& d, double gamma, double margin) {
    if (!(gamma > 0.0)) throw std::invalid_argument("synth_hinf: gamma must be positive");
    AssembledLmi assembled = assemble_hinf_lmi(augment(d), gamma);
    SolveResult solve = solve_feasibility({assembled.lmi}, assembled.variables, margin);

    SynthesisResult out;
    out.iterations = solve.iterations;
    if (solve.status != SolveStatus::Success) {
        out.status = map_status(solve.status);
        return out;
    }
    const LmiSolution& sol = *solve.solution;
    // P1 >= margin I, so the extraction is always well posed
    ControllerGain gain;
    gain.F = right_divide(sol.assignment.at("K1"), sol.assignment.at("P1"));
    gain.method = "hinf";
    gain.gamma = gamma;
    gain.eps = sol.eps;
    gain.margins = sol.lmi_lambda_max;
    out.status = SynthesisStatus::Success;
    out.gain = std::move(gain);
    out.certificate = sol;
    return out;
}

}  // namespace ddc
