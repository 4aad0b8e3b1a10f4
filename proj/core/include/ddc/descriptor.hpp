#pragma once

#include <ddc/experiments.hpp>

namespace ddc {

/// Data-based descriptor system
///
///   (Ed + dE) x_{k+1} = (Ad + dA) x_k + (Bd + dB) u_k + Bwd w_k
///   y_k = Cd x_k + Dd u_k
///
/// with structured uncertainties dE = Bwd Df Ke, dA = Bwd Df Ka,
/// dB = Bwd Df Kb, Df Df^T <= I. Bwd and Df are never observable; only the
/// nominal matrices and the shapers Ke, Ka, Kb below are data.
struct DescriptorData {
    Mat Ed, Ad;  // n x n
    Mat Bd;      // n x m
    Mat Cd;      // p x n
    Mat Dd;      // p x m
    Mat Ke, Ka;  // n x n
    Mat Kb;      // n x m
    double s0 = 0.5;
    double delta = 0.0;
    int l = 0;
    int n = 0;
    int m = 0;
};

/// First-order augmented form over xhat_k = [x_k; x_{k+1}]:
///   Ehat = [I 0; 0 0], Ahat = [0 I; Ad -Ed], Bhat = [0; Bd],
///   Ka_hat = [Ka, -Ke], Kb_hat = Kb, Chat = [Cd 0], Dhat = Dd.
struct AugmentedDescriptor {
    Mat Ehat, Ahat;  // 2n x 2n
    Mat Bhat;        // 2n x m
    Mat Chat;        // p x 2n
    Mat Dhat;        // p x m
    Mat Ka_hat;      // n x 2n
    Mat Kb_hat;      // n x m
    int n = 0;
    int m = 0;
    int p = 0;
};

/// Nominal matrices and uncertainty shapers from the experiment aggregates:
///   Ed = M N^-1, Ad = V T^-1, Bd = Ed R1 - Ad R0, Cd = Y X^-1,
///   Dd = Yp - Cd Xp,
///   Ke = -l sqrt(delta n) N^-1, Ka = -s0 l sqrt(delta n) T^-1,
///   Kb = -l sqrt(delta n) (N^-1 R1 - s0 T^-1 R0) - sqrt(delta m) [I; 0].
/// Inverses are pivoted-LU solves against identity columns.
DescriptorData build_descriptor(const Experiment1Aggregate& agg1,
                                const Experiment2Aggregate& agg2,
                                const ExperimentConfig& config);

AugmentedDescriptor augment(const DescriptorData& d);

/// Residuals of the exact data identities, evaluated with the recorded true
/// noise and the true plant (verification oracle). All values are relative.
struct ResidualReport {
    double e_residual = 0.0;
    double a_residual = 0.0;
    double b_residual = 0.0;
    double c_residual = 0.0;
    double d_residual = 0.0;

    double max_residual() const;
};

ResidualReport residual_report(const DescriptorData& d, const PlantModel& plant,
                               const Mat& oracle_W, const Mat& oracle_W0);

}  // namespace ddc
