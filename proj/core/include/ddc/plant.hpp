#pragma once

#include <ddc/rng.hpp>
#include <ddc/types.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace ddc {

/// Ground-truth discrete LTI plant
///
///   x_{k+1} = A x_k + B u_k + Bw w_k
///   y_k     = C x_k + D u_k
///
/// Simulator-side secret: synthesis never sees these matrices.
struct PlantModel {
    Mat A;   // n x n
    Mat B;   // n x m
    Mat Bw;  // n x q
    Mat C;   // p x n
    Mat D;   // p x m

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }
    int q() const { return static_cast<int>(Bw.cols()); }

    /// Throws std::invalid_argument on inconsistent dimensions or m > n.
    void validate() const;
};

/// Per-step energy-bounded noise: every sample satisfies ||w||^2 <= delta.
struct NoiseProcess {
    double delta = 0.0;
    std::uint64_t seed = 0;
};

struct Trajectory {
    std::vector<Vec> states;   // x_0 .. x_L
    std::vector<Vec> inputs;   // u_0 .. u_{L-1}
    std::vector<Vec> noises;   // w_0 .. w_{L-1}
    std::vector<Vec> outputs;  // y_0 .. y_{L-1}

    int length() const { return static_cast<int>(inputs.size()); }
};

/// One simulation step. Returns (x_next, y).
std::pair<Vec, Vec> step(const PlantModel& plant, const Vec& x, const Vec& u, const Vec& w);

/// Uniform sample from the closed ball of radius sqrt(delta); deterministic
/// in (noise.seed, draw_index).
Vec sample_noise(const NoiseProcess& noise, int q, std::uint64_t draw_index = 0);

/// Open-loop simulation; noises are drawn per step (draw index = k) and
/// recorded in the trajectory.
Trajectory simulate(const PlantModel& plant, const Vec& x0, const std::vector<Vec>& inputs,
                    const NoiseProcess& noise);

/// Closed-loop simulation with u_k = F x_k for `steps` steps.
Trajectory simulate_closed_loop(const PlantModel& plant, const Mat& F, const Vec& x0,
                                const NoiseProcess& noise, int steps);

/// Model-based descriptor quantities (verification oracle; requires the
/// true plant, so it is never visible to synthesis):
///   E = (s0 I - A)^-1,  A_star = E A,  B_star = E B,  Bwd = E Bw.
struct TrueDescriptor {
    Mat E;
    Mat A;
    Mat B;
    Mat Bwd;
};

/// Throws SingularShiftError when rcond(s0 I - A) < 1e-10.
TrueDescriptor true_descriptor(const PlantModel& plant, double s0);

}  // namespace ddc
