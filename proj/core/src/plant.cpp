#include <ddc/plant.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace ddc {

double reciprocal_condition(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    double smax = sv(0);
    double smin = sv(sv.size() - 1);
    if (smax <= 0.0) return 0.0;
    return smin / smax;
}

void PlantModel::validate() const {
    const auto n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("PlantModel: A must be square");
    if (B.rows() != n) throw std::invalid_argument("PlantModel: B row count != n");
    if (Bw.rows() != n) throw std::invalid_argument("PlantModel: Bw row count != n");
    if (C.cols() != n) throw std::invalid_argument("PlantModel: C column count != n");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw std::invalid_argument("PlantModel: D must be p x m");
    if (n < 1 || B.cols() < 1 || C.rows() < 1 || Bw.cols() < 1)
        throw std::invalid_argument("PlantModel: dimensions must be positive");
    if (B.cols() > n)
        throw std::invalid_argument("PlantModel: m > n is not supported");
}

std::pair<Vec, Vec> step(const PlantModel& plant, const Vec& x, const Vec& u, const Vec& w) {
    if (x.size() != plant.n() || u.size() != plant.m() || w.size() != plant.q())
        throw std::invalid_argument("step: dimension mismatch");
    Vec x_next = plant.A * x + plant.B * u + plant.Bw * w;
    Vec y = plant.C * x + plant.D * u;
    return {std::move(x_next), std::move(y)};
}

Vec sample_noise(const NoiseProcess& noise, int q, std::uint64_t draw_index) {
    if (q < 1) throw std::invalid_argument("sample_noise: q must be >= 1");
    if (noise.delta < 0.0) throw std::invalid_argument("sample_noise: delta must be >= 0");
    if (noise.delta == 0.0) return Vec::Zero(q);
    RngStream stream = RngStream(noise.seed).child(draw_index);
    Vec g = stream.gaussian_vector(q);
    double norm = g.norm();
    if (norm == 0.0) return Vec::Zero(q);
    double radius = std::sqrt(noise.delta) * std::pow(stream.next_uniform(), 1.0 / q);
    return (radius / norm) * g;
}

Trajectory simulate(const PlantModel& plant, const Vec& x0, const std::vector<Vec>& inputs,
                    const NoiseProcess& noise) {
    plant.validate();
    if (inputs.empty()) throw std::invalid_argument("simulate: inputs must be nonempty");
    if (x0.size() != plant.n()) throw std::invalid_argument("simulate: x0 dimension mismatch");

    Trajectory traj;
    traj.states.reserve(inputs.size() + 1);
    traj.inputs.reserve(inputs.size());
    traj.noises.reserve(inputs.size());
    traj.outputs.reserve(inputs.size());

    traj.states.push_back(x0);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        Vec w = sample_noise(noise, plant.q(), k);
        auto [x_next, y] = step(plant, traj.states.back(), inputs[k], w);
        traj.inputs.push_back(inputs[k]);
        traj.noises.push_back(std::move(w));
        traj.outputs.push_back(std::move(y));
        traj.states.push_back(std::move(x_next));
    }
    return traj;
}

Trajectory simulate_closed_loop(const PlantModel& plant, const Mat& F, const Vec& x0,
                                const NoiseProcess& noise, int steps) {
    plant.validate();
    if (steps < 1) throw std::invalid_argument("simulate_closed_loop: steps must be >= 1");
    if (F.rows() != plant.m() || F.cols() != plant.n())
        throw std::invalid_argument("simulate_closed_loop: F must be m x n");
    if (x0.size() != plant.n())
        throw std::invalid_argument("simulate_closed_loop: x0 dimension mismatch");

    Trajectory traj;
    traj.states.reserve(steps + 1);
    traj.states.push_back(x0);
    for (int k = 0; k < steps; ++k) {
        Vec u = F * traj.states.back();
        Vec w = sample_noise(noise, plant.q(), k);
        auto [x_next, y] = step(plant, traj.states.back(), u, w);
        traj.inputs.push_back(std::move(u));
        traj.noises.push_back(std::move(w));
        traj.outputs.push_back(std::move(y));
        traj.states.push_back(std::move(x_next));
    }
    return traj;
}

TrueDescriptor true_descriptor(const PlantModel& plant, double s0) {
    plant.validate();
    const int n = plant.n();
    Mat shifted = s0 * Mat::Identity(n, n) - plant.A;
    if (reciprocal_condition(shifted) < 1e-10)
        throw SingularShiftError("true_descriptor: s0*I - A is singular or ill-conditioned");
    Eigen::PartialPivLU<Mat> lu(shifted);
    TrueDescriptor d;
    d.E = lu.solve(Mat::Identity(n, n));
    d.A = lu.solve(plant.A);
    d.B = lu.solve(plant.B);
    d.Bwd = lu.solve(plant.Bw);
    return d;
}

}  // namespace ddc
