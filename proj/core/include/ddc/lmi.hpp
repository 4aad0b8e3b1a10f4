#pragma once

#include <ddc/descriptor.hpp>
#include <ddc/sdp.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddc {

enum class VarStructure { Full, Symmetric, SymmetricPositiveDefinite, ScalarPositive };
enum class TieTransform { Identity, Transpose, Negate };

/// A rectangular region of a composite variable equal to another variable
/// (optionally transposed or negated).
struct BlockTie {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    std::string source;
    TieTransform transform = TieTransform::Identity;
};

struct ZeroBlock {
    Eigen::Index row = 0, col = 0, rows = 0, cols = 0;
};

/// Structured matrix decision variable. A variable with ties or zero blocks
/// is composite: it owns no scalars of its own, and every entry must be
/// covered by exactly one tie or zero block.
struct MatrixVariable {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    VarStructure structure = VarStructure::Full;
    std::vector<BlockTie> ties;
    std::vector<ZeroBlock> zeros;

    bool is_composite() const { return !ties.empty() || !zeros.empty(); }
};

using Assignment = std::map<std::string, Mat>;

/// One affine term `left * V * right` (V transposed when transpose_var).
/// For 1x1 (scalar) variables with left.cols() != 1 the variable broadcasts:
/// the term evaluates to v * left * right.
struct Term {
    Mat left;
    std::string var;
    bool transpose_var = false;
    Mat right;
};

/// Constant matrix plus a sum of affine terms.
struct AffineExpr {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Mat constant;
    std::vector<Term> terms;

    static AffineExpr zero(Eigen::Index r, Eigen::Index c);
    AffineExpr& add_const(const Mat& m);
    AffineExpr& add(Mat left, std::string var, Mat right, bool transpose_var = false);
};

/// Symmetric block LMI `M(vars) < 0`: an r x r grid of affine expressions of
/// which only the upper triangle is stored; block (j,i) is the transpose of
/// block (i,j). `margin` is the required definiteness depth (M <= -margin I).
struct BlockLmi {
    std::string name;
    std::vector<Eigen::Index> block_dims;
    std::vector<std::optional<AffineExpr>> grid;  // row-major r*r, upper triangle used
    double margin = 0.0;

    explicit BlockLmi(std::string name, std::vector<Eigen::Index> dims);
    BlockLmi() = default;

    Eigen::Index dim() const;
    int block_count() const { return static_cast<int>(block_dims.size()); }
    AffineExpr& block(int i, int j);
    const AffineExpr* block_ptr(int i, int j) const;
};

/// Resolve a variable to its matrix value (ties, zero blocks and symmetry
/// applied). Throws std::invalid_argument on missing assignments.
Mat materialize(const MatrixVariable& var, const std::vector<MatrixVariable>& all,
                const Assignment& assignment);

/// Assemble the full symmetric matrix of the LMI at an assignment.
Mat evaluate(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars,
             const Assignment& assignment);

enum class SolveStatus { Success, Infeasible, NumericalFailure };

struct LmiSolution {
    Assignment assignment;               // all variables, composites materialized
    double achieved_margin = 0.0;        // -max over LMIs of lambda_max
    std::vector<double> lmi_lambda_max;  // per input LMI
    SolveStatus solver_status = SolveStatus::NumericalFailure;
    int iterations = 0;
    double eps = 0.0;  // value of the scalar variable named "eps" when present
};

struct SolveResult {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::optional<LmiSolution> solution;
    int iterations = 0;
};

struct SolveOptions {
    int max_iterations = 250;
    double tolerance = 1e-9;
};

/// Semidefinite feasibility: find an assignment with every LMI at its margin
/// and every positive-definite/scalar-positive variable at the solve margin.
/// A Success result is always re-verified by this module's own eigenvalue
/// computation; a solver point that fails re-verification is reported as
/// NumericalFailure, never Success.
SolveResult solve_feasibility(const std::vector<BlockLmi>& lmis,
                              const std::vector<MatrixVariable>& vars, double margin,
                              const SolveOptions& options = {});

/// Largest eigenvalue of the assembled LMI at the assignment. Structural
/// ties, fixed-zero blocks and declared symmetry are re-checked exactly;
/// violations throw std::invalid_argument.
double verify_solution(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars,
                       const Assignment& assignment);

/// Petersen-lemma sufficient condition:
/// lambda_max(Zh + eps Xh Xh' + (1/eps) Yh' Yh) < 0.
bool petersen_sufficient(const Mat& Zh, const Mat& Xh, const Mat& Yh, double eps);

struct AssembledLmi {
    BlockLmi lmi;
    std::vector<MatrixVariable> variables;
};

/// Data-based robust stabilization condition (3x3 grid, total size 5n) in
/// variables {P, Q, Z, K, H3, H4, G3, G4, eps} with composite
/// H = [K 0; H3 H4], G = [K 0; G3 G4]. Feedback gain F = Z K^-1.
AssembledLmi assemble_robust_lmi(const AugmentedDescriptor& aug);

/// Data-based H-infinity synthesis condition (4x4 grid, total size 5n + p)
/// in variables {P1, P4, S1, S2, K1, eps}. Feedback gain F = K1 P1^-1.
AssembledLmi assemble_hinf_lmi(const AugmentedDescriptor& aug, double gamma);

/// Model-based robust condition: identical to assemble_robust_lmi except the
/// (1,1) block gains eps * Bw_hat Bw_hat' with Bw_hat = [0; Bwd]. Requires
/// the simulator-side Bwd; testing oracle only.
AssembledLmi assemble_model_robust(const AugmentedDescriptor& aug, const Mat& Bwd);

/// Model-based H-infinity analysis condition for a (closed-loop) augmented
/// descriptor system, in variables {Phat, Shat}. Testing oracle only.
AssembledLmi assemble_model_hinf(const Mat& Ehat, const Mat& Ahat_closed, const Mat& Bw_hat,
                                 const Mat& Chat_closed, double gamma);

/// Lowered standard-form problem (exposed for the lowering-soundness tests
/// and for benchmarks). Scalar layout: the first `num_scalars` engine
/// variables are the flattened matrix variables, the last is the phase-1
/// slack.
struct LoweredProblem {
    sdp::Problem problem;
    int num_scalars = 0;
    std::vector<std::string> scalar_owner;  // variable name per scalar
};

LoweredProblem lower_to_sdp(const std::vector<BlockLmi>& lmis,
                            const std::vector<MatrixVariable>& vars, double margin);

/// Assignment from a flat scalar vector in the lowering's layout.
Assignment assignment_from_scalars(const std::vector<MatrixVariable>& vars, const Vec& x);

/// Debug dump (block shapes, variable names, constant blocks) as a JSON text.
std::string lmi_debug_json(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars);

}  // namespace ddc
