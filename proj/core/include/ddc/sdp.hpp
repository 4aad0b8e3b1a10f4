#pragma once

#include <ddc/types.hpp>

#include <functional>
#include <vector>

namespace ddc::sdp {

/// Dual-form semidefinite program over a product of dense PSD cones:
///
///   maximize  b' y   subject to   S_j = C_j - sum_i y_i A[j][i] >= 0.
///
/// All C_j and A[j][i] must be symmetric. This is the embedded engine behind
/// lmi::solve_feasibility; it is small-dense only (no sparsity exploitation).
struct Problem {
    std::vector<Mat> C;
    std::vector<std::vector<Mat>> A;  // A[block][variable]
    Vec b;

    int num_vars() const { return static_cast<int>(b.size()); }
    int num_blocks() const { return static_cast<int>(C.size()); }
    void validate() const;
};

struct Options {
    int max_iterations = 200;
    double step_fraction = 0.96;
    double tolerance = 1e-9;
    /// Called after every iterate update; returning true stops the solve
    /// with Status::Accepted (used for feasibility early exit).
    std::function<bool(const Vec& y)> accept;
};

enum class Status {
    Accepted,         // accept() returned true
    Converged,        // optimality tolerances met, accept() never fired
    IterationLimit,   // ran out of iterations
    NumericalFailure  // non-finite iterates or unfactorable systems
};

struct Result {
    Status status = Status::NumericalFailure;
    Vec y;
    double objective = 0.0;
    int iterations = 0;
    double mu = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Infeasible-start primal-dual path following with Nesterov-Todd scaling
/// and a Mehrotra-style adaptive centering parameter.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace ddc::sdp
