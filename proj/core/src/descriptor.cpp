#include <ddc/descriptor.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddc {
namespace {

Mat lu_inverse(const Mat& m, const char* what, double floor) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= floor * (1.0 + sv(0)))
        throw ConditioningError(std::string("build_descriptor: singular data matrix ") + what);
    return Eigen::PartialPivLU<Mat>(m).solve(Mat::Identity(m.rows(), m.cols()));
}

Mat input_padding(int n, int m) {
    Mat pad = Mat::Zero(n, m);
    pad.topRows(m) = Mat::Identity(m, m);
    return pad;
}

double relative_residual(const Mat& diff, const Mat& reference) {
    return diff.cwiseAbs().maxCoeff() / (1.0 + reference.cwiseAbs().maxCoeff());
}

}  // namespace

DescriptorData build_descriptor(const Experiment1Aggregate& agg1,
                                const Experiment2Aggregate& agg2,
                                const ExperimentConfig& config) {
    config.validate();
    const int n = static_cast<int>(agg1.N.rows());
    const int m = static_cast<int>(agg2.R1.cols());
    if (n != config.n || m != config.m)
        throw std::invalid_argument("build_descriptor: aggregate dims inconsistent with config");

    Mat Ninv = lu_inverse(agg1.N, "N", config.cond_threshold * 1e-4);
    Mat Tinv = lu_inverse(agg1.T, "T", config.cond_threshold * 1e-4);
    Mat Xinv = lu_inverse(agg1.X, "X", config.cond_threshold * 1e-4);

    DescriptorData d;
    d.s0 = config.s0;
    d.delta = config.delta;
    d.l = config.l;
    d.n = n;
    d.m = m;
    d.Ed = agg1.M * Ninv;
    d.Ad = agg1.V * Tinv;
    d.Bd = d.Ed * agg2.R1 - d.Ad * agg2.R0;
    d.Cd = agg1.Y * Xinv;
    d.Dd = agg2.Yp - d.Cd * agg2.Xp;

    const double scale1 = config.l * std::sqrt(config.delta * n);
    const double scale0 = std::sqrt(config.delta * m);
    d.Ke = -scale1 * Ninv;
    d.Ka = -config.s0 * scale1 * Tinv;
    d.Kb = -scale1 * (Ninv * agg2.R1 - config.s0 * Tinv * agg2.R0) -
           scale0 * input_padding(n, m);
    return d;
}

AugmentedDescriptor augment(const DescriptorData& d) {
    const int n = d.n;
    const int m = d.m;
    const int p = static_cast<int>(d.Cd.rows());

    AugmentedDescriptor a;
    a.n = n;
    a.m = m;
    a.p = p;

    a.Ehat = Mat::Zero(2 * n, 2 * n);
    a.Ehat.topLeftCorner(n, n) = Mat::Identity(n, n);

    a.Ahat = Mat::Zero(2 * n, 2 * n);
    a.Ahat.topRightCorner(n, n) = Mat::Identity(n, n);
    a.Ahat.bottomLeftCorner(n, n) = d.Ad;
    a.Ahat.bottomRightCorner(n, n) = -d.Ed;

    a.Bhat = Mat::Zero(2 * n, m);
    a.Bhat.bottomRows(n) = d.Bd;

    a.Chat = Mat::Zero(p, 2 * n);
    a.Chat.leftCols(n) = d.Cd;
    a.Dhat = d.Dd;

    a.Ka_hat = Mat(n, 2 * n);
    a.Ka_hat.leftCols(n) = d.Ka;
    a.Ka_hat.rightCols(n) = -d.Ke;
    a.Kb_hat = d.Kb;
    return a;
}

double ResidualReport::max_residual() const {
    return std::max({e_residual, a_residual, b_residual, c_residual, d_residual});
}

ResidualReport residual_report(const DescriptorData& d, const PlantModel& plant,
                               const Mat& oracle_W, const Mat& oracle_W0) {
    TrueDescriptor truth = true_descriptor(plant, d.s0);
    const int n = d.n;
    const int m = d.m;
    const double scale1 = d.l * std::sqrt(d.delta * n);
    const double scale0 = std::sqrt(d.delta * m);

    // Df = W / (l sqrt(delta n)); zero in the noiseless case.
    Mat Df = d.delta > 0.0 ? Mat(oracle_W / scale1) : Mat(Mat::Zero(plant.q(), n));

    ResidualReport r;
    r.e_residual = relative_residual(d.Ed + truth.Bwd * Df * d.Ke - truth.E, truth.E);
    r.a_residual = relative_residual(d.Ad + truth.Bwd * Df * d.Ka - truth.A, truth.A);
    Mat pad = input_padding(n, m);
    Mat theta = Df * (d.Kb + scale0 * pad) - oracle_W0;
    r.b_residual = relative_residual(d.Bd + truth.Bwd * theta - truth.B, truth.B);
    r.c_residual = relative_residual(d.Cd - plant.C, plant.C);
    r.d_residual = relative_residual(d.Dd - plant.D, plant.D);
    return r;
}

}  // namespace ddc
