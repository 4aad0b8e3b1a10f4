#include <ddc/verify.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ddc {
namespace {

constexpr int kGridPoints = 512;

double sigma_max_at(const Mat& Acl, const Mat& Bw, const Mat& Ccl, double theta) {
    using CMat = Eigen::MatrixXcd;
    const auto n = Acl.rows();
    std::complex<double> z = std::polar(1.0, theta);
    CMat shifted = z * CMat::Identity(n, n) - Acl.cast<std::complex<double>>();
    CMat H = Ccl.cast<std::complex<double>>() *
             shifted.partialPivLu().solve(Bw.cast<std::complex<double>>());
    Eigen::JacobiSVD<CMat> svd(H);
    return svd.singularValues()(0);
}

}  // namespace

double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix not square");
    Eigen::EigenSolver<Mat> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hinf_norm(const PlantModel& plant, const Mat& F, double tol) {
    plant.validate();
    if (F.rows() != plant.m() || F.cols() != plant.n())
        throw std::invalid_argument("hinf_norm: F must be m x n");
    if (!(tol > 0.0)) throw std::invalid_argument("hinf_norm: tol must be positive");

    Mat Acl = plant.A + plant.B * F;
    if (spectral_radius(Acl) >= 1.0) return std::numeric_limits<double>::infinity();
    Mat Ccl = plant.C + plant.D * F;

    // coarse grid over [0, pi] (real system: the response is symmetric)
    double best = 0.0;
    int best_idx = 0;
    std::vector<double> grid(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
        double theta = std::numbers::pi * i / (kGridPoints - 1);
        grid[i] = sigma_max_at(Acl, plant.Bw, Ccl, theta);
        if (grid[i] > best) {
            best = grid[i];
            best_idx = i;
        }
    }

    // golden-section refinement on the bracket around the grid maximum
    const double step = std::numbers::pi / (kGridPoints - 1);
    double a = std::max(0.0, (best_idx - 1) * step);
    double b = std::min(std::numbers::pi, (best_idx + 1) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = sigma_max_at(Acl, plant.Bw, Ccl, x1);
    double f2 = sigma_max_at(Acl, plant.Bw, Ccl, x2);
    while (b - a > tol * std::max(1.0, b)) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = sigma_max_at(Acl, plant.Bw, Ccl, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = sigma_max_at(Acl, plant.Bw, Ccl, x1);
        }
        best = std::max({best, f1, f2});
    }
    return std::max({best, f1, f2});
}

EnergyRatioResult empirical_energy_ratio(const PlantModel& plant, const Mat& F,
                                         const NoiseProcess& noise, int L, int trials) {
    plant.validate();
    if (L < 100) throw std::invalid_argument("empirical_energy_ratio: L must be >= 100");
    if (trials < 1) throw std::invalid_argument("empirical_energy_ratio: trials must be >= 1");

    EnergyRatioResult out;
    RngStream base(noise.seed);
    for (int t = 0; t < trials; ++t) {
        NoiseProcess trial_noise{noise.delta, base.child_seed(t)};
        Trajectory traj = simulate_closed_loop(plant, F, Vec::Zero(plant.n()), trial_noise, L);
        double wy = 0.0, ww = 0.0;
        for (int k = 0; k < L; ++k) {
            wy += traj.outputs[k].squaredNorm();
            ww += traj.noises[k].squaredNorm();
        }
        if (ww == 0.0) {
            ++out.skipped_trials;
            continue;
        }
        out.ratios.push_back(wy / ww);
    }
    return out;
}

bool VerificationReport::pass() const {
    if (!stable) return false;
    if (!gamma_target) return true;
    if (!(hinf_norm <= *gamma_target + 1e-6)) return false;
    const double bound = (*gamma_target) * (*gamma_target) * 1.05;
    for (double r : empirical_energy_ratios)
        if (!(r <= bound)) return false;
    return true;
}

VerificationReport verify_controller(const PlantModel& plant, const Mat& F,
                                     std::optional<double> gamma_target,
                                     const VerifyOptions& options) {
    VerificationReport report;
    report.gamma_target = gamma_target;
    report.spectral_radius = spectral_radius(plant.A + plant.B * F);
    report.stable = report.spectral_radius < 1.0;
    if (!report.stable) {
        report.hinf_norm = std::numeric_limits<double>::infinity();
        return report;
    }
    report.hinf_norm = hinf_norm(plant, F, options.norm_tol);
    NoiseProcess noise{options.noise_delta, options.noise_seed};
    EnergyRatioResult ratios = empirical_energy_ratio(plant, F, noise, options.energy_horizon,
                                                      options.energy_trials);
    report.empirical_energy_ratios = std::move(ratios.ratios);
    report.skipped_trials = ratios.skipped_trials;
    return report;
}

}  // namespace ddc
