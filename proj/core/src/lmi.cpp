#include <ddc/lmi.hpp>

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddc {
namespace {

using json = nlohmann::json;

double lambda_max_sym(const Mat& m) {
    Mat s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double lambda_min_sym(const Mat& m) {
    Mat s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

int scalar_count(const MatrixVariable& v) {
    if (v.is_composite()) return 0;
    switch (v.structure) {
        case VarStructure::Full:
            return static_cast<int>(v.rows * v.cols);
        case VarStructure::Symmetric:
        case VarStructure::SymmetricPositiveDefinite:
            return static_cast<int>(v.rows * (v.rows + 1) / 2);
        case VarStructure::ScalarPositive:
            return 1;
    }
    return 0;
}

// (row, col) of the local upper-triangle index of a symmetric variable
std::pair<Eigen::Index, Eigen::Index> triangle_position(Eigen::Index r, int local) {
    int k = local;
    for (Eigen::Index i = 0; i < r; ++i) {
        Eigen::Index row_len = r - i;
        if (k < row_len) return {i, i + k};
        k -= static_cast<int>(row_len);
    }
    throw std::logic_error("triangle_position: index out of range");
}

Mat basis_matrix(const MatrixVariable& v, int local) {
    Mat b = Mat::Zero(v.rows, v.cols);
    switch (v.structure) {
        case VarStructure::Full:
            b(local / v.cols, local % v.cols) = 1.0;
            break;
        case VarStructure::Symmetric:
        case VarStructure::SymmetricPositiveDefinite: {
            auto [i, j] = triangle_position(v.rows, local);
            b(i, j) = 1.0;
            b(j, i) = 1.0;
            break;
        }
        case VarStructure::ScalarPositive:
            b(0, 0) = 1.0;
            break;
    }
    return b;
}

const MatrixVariable& find_var(const std::vector<MatrixVariable>& vars, const std::string& name) {
    for (const auto& v : vars)
        if (v.name == name) return v;
    throw std::invalid_argument("lmi: unknown variable '" + name + "'");
}

void validate_variables(const std::vector<MatrixVariable>& vars) {
    for (const auto& v : vars) {
        if (v.rows < 1 || v.cols < 1)
            throw std::invalid_argument("lmi: variable '" + v.name + "' has empty shape");
        if ((v.structure == VarStructure::Symmetric ||
             v.structure == VarStructure::SymmetricPositiveDefinite) &&
            v.rows != v.cols)
            throw std::invalid_argument("lmi: symmetric variable '" + v.name + "' not square");
        if (v.structure == VarStructure::ScalarPositive && (v.rows != 1 || v.cols != 1))
            throw std::invalid_argument("lmi: scalar variable '" + v.name + "' must be 1x1");
        if (!v.is_composite()) continue;

        Eigen::MatrixXi covered = Eigen::MatrixXi::Zero(v.rows, v.cols);
        for (const auto& tie : v.ties) {
            const auto& src = find_var(vars, tie.source);
            if (src.is_composite())
                throw std::invalid_argument("lmi: tie source '" + tie.source + "' is composite");
            Eigen::Index r = tie.transform == TieTransform::Transpose ? src.cols : src.rows;
            Eigen::Index c = tie.transform == TieTransform::Transpose ? src.rows : src.cols;
            if (tie.row < 0 || tie.col < 0 || tie.row + r > v.rows || tie.col + c > v.cols)
                throw std::invalid_argument("lmi: tie out of bounds in '" + v.name + "'");
            covered.block(tie.row, tie.col, r, c).array() += 1;
        }
        for (const auto& z : v.zeros) {
            if (z.row < 0 || z.col < 0 || z.row + z.rows > v.rows || z.col + z.cols > v.cols)
                throw std::invalid_argument("lmi: zero block out of bounds in '" + v.name + "'");
            covered.block(z.row, z.col, z.rows, z.cols).array() += 1;
        }
        if ((covered.array() != 1).any())
            throw std::invalid_argument("lmi: composite variable '" + v.name +
                                        "' must be covered exactly once by ties/zeros");
    }
}

Mat term_value(const Term& t, const Mat& value) {
    Mat v = t.transpose_var ? Mat(value.transpose()) : value;
    if (v.rows() == 1 && v.cols() == 1 && t.left.cols() != 1) {
        if (t.left.cols() != t.right.rows())
            throw std::invalid_argument("lmi: term shape mismatch (scalar broadcast)");
        return v(0, 0) * (t.left * t.right);
    }
    if (t.left.cols() != v.rows() || v.cols() != t.right.rows())
        throw std::invalid_argument("lmi: term shape mismatch for variable '" + t.var + "'");
    return t.left * v * t.right;
}

Assignment zero_assignment(const std::vector<MatrixVariable>& vars) {
    Assignment a;
    for (const auto& v : vars)
        if (!v.is_composite()) a[v.name] = Mat::Zero(v.rows, v.cols);
    return a;
}

}  // namespace

AffineExpr AffineExpr::zero(Eigen::Index r, Eigen::Index c) {
    AffineExpr e;
    e.rows = r;
    e.cols = c;
    e.constant = Mat::Zero(r, c);
    return e;
}

AffineExpr& AffineExpr::add_const(const Mat& m) {
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument("AffineExpr: constant shape mismatch");
    constant += m;
    return *this;
}

AffineExpr& AffineExpr::add(Mat left, std::string var, Mat right, bool transpose_var) {
    if (left.rows() != rows || right.cols() != cols)
        throw std::invalid_argument("AffineExpr: term shape mismatch");
    terms.push_back(Term{std::move(left), std::move(var), transpose_var, std::move(right)});
    return *this;
}

BlockLmi::BlockLmi(std::string name_, std::vector<Eigen::Index> dims)
    : name(std::move(name_)), block_dims(std::move(dims)) {
    grid.resize(block_dims.size() * block_dims.size());
}

Eigen::Index BlockLmi::dim() const {
    Eigen::Index d = 0;
    for (auto b : block_dims) d += b;
    return d;
}

AffineExpr& BlockLmi::block(int i, int j) {
    if (i > j) throw std::invalid_argument("BlockLmi: only the upper triangle is stored");
    auto& slot = grid[static_cast<std::size_t>(i) * block_dims.size() + j];
    if (!slot) slot = AffineExpr::zero(block_dims[i], block_dims[j]);
    return *slot;
}

const AffineExpr* BlockLmi::block_ptr(int i, int j) const {
    if (i > j) return nullptr;
    const auto& slot = grid[static_cast<std::size_t>(i) * block_dims.size() + j];
    return slot ? &*slot : nullptr;
}

Mat materialize(const MatrixVariable& var, const std::vector<MatrixVariable>& all,
                const Assignment& assignment) {
    if (!var.is_composite()) {
        auto it = assignment.find(var.name);
        if (it == assignment.end())
            throw std::invalid_argument("lmi: missing assignment for '" + var.name + "'");
        const Mat& m = it->second;
        if (m.rows() != var.rows || m.cols() != var.cols)
            throw std::invalid_argument("lmi: assignment shape mismatch for '" + var.name + "'");
        return m;
    }
    Mat out = Mat::Zero(var.rows, var.cols);
    for (const auto& tie : var.ties) {
        Mat src = materialize(find_var(all, tie.source), all, assignment);
        switch (tie.transform) {
            case TieTransform::Identity:
                break;
            case TieTransform::Transpose:
                src = src.transpose().eval();
                break;
            case TieTransform::Negate:
                src = -src;
                break;
        }
        out.block(tie.row, tie.col, src.rows(), src.cols()) = src;
    }
    return out;
}

Mat evaluate(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars,
             const Assignment& assignment) {
    std::map<std::string, Mat> values;
    for (const auto& v : vars) values[v.name] = materialize(v, vars, assignment);

    const int r = lmi.block_count();
    std::vector<Eigen::Index> offset(r + 1, 0);
    for (int i = 0; i < r; ++i) offset[i + 1] = offset[i] + lmi.block_dims[i];

    Mat out = Mat::Zero(lmi.dim(), lmi.dim());
    for (int i = 0; i < r; ++i) {
        for (int j = i; j < r; ++j) {
            const AffineExpr* expr = lmi.block_ptr(i, j);
            if (!expr) continue;
            Mat blk = expr->constant;
            for (const auto& term : expr->terms) {
                auto it = values.find(term.var);
                if (it == values.end())
                    throw std::invalid_argument("lmi: term references unknown variable '" +
                                                term.var + "'");
                blk += term_value(term, it->second);
            }
            out.block(offset[i], offset[j], blk.rows(), blk.cols()) = blk;
            if (i != j)
                out.block(offset[j], offset[i], blk.cols(), blk.rows()) = blk.transpose();
        }
    }
    return out;
}

bool petersen_sufficient(const Mat& Zh, const Mat& Xh, const Mat& Yh, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("petersen_sufficient: eps must be positive");
    if (Zh.rows() != Zh.cols()) throw std::invalid_argument("petersen_sufficient: Zh not square");
    if ((Zh - Zh.transpose()).cwiseAbs().maxCoeff() >
        1e-9 * (1.0 + Zh.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("petersen_sufficient: Zh not symmetric");
    if (Xh.rows() != Zh.rows() || Yh.cols() != Zh.cols())
        throw std::invalid_argument("petersen_sufficient: shape mismatch");
    Mat m = 0.5 * (Zh + Zh.transpose()) + eps * (Xh * Xh.transpose()) +
            (1.0 / eps) * (Yh.transpose() * Yh);
    return lambda_max_sym(m) < 0.0;
}

LoweredProblem lower_to_sdp(const std::vector<BlockLmi>& lmis,
                            const std::vector<MatrixVariable>& vars, double margin) {
    validate_variables(vars);
    LoweredProblem low;
    for (const auto& v : vars) {
        int c = scalar_count(v);
        for (int s = 0; s < c; ++s) low.scalar_owner.push_back(v.name);
    }
    low.num_scalars = static_cast<int>(low.scalar_owner.size());
    const int k = low.num_scalars;
    const int t_index = k;

    sdp::Problem& prob = low.problem;
    prob.b = Vec::Zero(k + 1);
    prob.b(t_index) = -1.0;  // maximize -t

    Assignment zero = zero_assignment(vars);

    // one engine block per LMI, phase-1 relaxed
    for (const auto& lmi : lmis) {
        const auto d = lmi.dim();
        const double req = lmi.margin > 0.0 ? lmi.margin : margin;
        Mat m0 = evaluate(lmi, vars, zero);
        Mat C = -(0.5 * (m0 + m0.transpose()) + req * Mat::Identity(d, d));
        std::vector<Mat> A(k + 1);
        int s_global = 0;
        for (const auto& v : vars) {
            int c = scalar_count(v);
            for (int s = 0; s < c; ++s, ++s_global) {
                Assignment a = zero;
                a[v.name] = basis_matrix(v, s);
                Mat ms = evaluate(lmi, vars, a) - m0;
                A[s_global] = 0.5 * (ms + ms.transpose());
            }
        }
        A[t_index] = -Mat::Identity(d, d);
        prob.C.push_back(std::move(C));
        prob.A.push_back(std::move(A));
    }

    // cone constraints for structured variables (no phase-1 relaxation)
    int s_global = 0;
    for (const auto& v : vars) {
        int c = scalar_count(v);
        if (v.structure == VarStructure::SymmetricPositiveDefinite ||
            v.structure == VarStructure::ScalarPositive) {
            const auto d = v.rows;
            Mat C = -margin * Mat::Identity(d, d);
            std::vector<Mat> A(k + 1, Mat::Zero(d, d));
            for (int s = 0; s < c; ++s) A[s_global + s] = -basis_matrix(v, s);
            A[t_index] = Mat::Zero(d, d);
            prob.C.push_back(std::move(C));
            prob.A.push_back(std::move(A));
        }
        s_global += c;
    }

    // cap on the phase-1 slack keeps the feasible-problem dual bounded
    {
        Mat C(1, 1);
        C(0, 0) = 1e6;
        std::vector<Mat> A(k + 1, Mat::Zero(1, 1));
        A[t_index](0, 0) = -1.0;
        prob.C.push_back(std::move(C));
        prob.A.push_back(std::move(A));
    }
    return low;
}

Assignment assignment_from_scalars(const std::vector<MatrixVariable>& vars, const Vec& x) {
    Assignment a;
    int s_global = 0;
    for (const auto& v : vars) {
        int c = scalar_count(v);
        if (c > 0) {
            Mat m = Mat::Zero(v.rows, v.cols);
            for (int s = 0; s < c; ++s) {
                switch (v.structure) {
                    case VarStructure::Full:
                        m(s / v.cols, s % v.cols) = x(s_global + s);
                        break;
                    case VarStructure::Symmetric:
                    case VarStructure::SymmetricPositiveDefinite: {
                        auto [i, j] = triangle_position(v.rows, s);
                        m(i, j) = x(s_global + s);
                        m(j, i) = x(s_global + s);
                        break;
                    }
                    case VarStructure::ScalarPositive:
                        m(0, 0) = x(s_global + s);
                        break;
                }
            }
            a[v.name] = std::move(m);
        }
        s_global += c;
    }
    for (const auto& v : vars)
        if (v.is_composite()) a[v.name] = materialize(v, vars, a);
    return a;
}

double verify_solution(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars,
                       const Assignment& assignment) {
    // structural re-checks: exact ties, exact zero blocks, exact symmetry
    for (const auto& v : vars) {
        auto it = assignment.find(v.name);
        if (it == assignment.end())
            throw std::invalid_argument("verify_solution: missing assignment for '" + v.name +
                                        "'");
        const Mat& m = it->second;
        if (m.rows() != v.rows || m.cols() != v.cols)
            throw std::invalid_argument("verify_solution: shape mismatch for '" + v.name + "'");
        if ((v.structure == VarStructure::Symmetric ||
             v.structure == VarStructure::SymmetricPositiveDefinite) &&
            m != m.transpose())
            throw std::invalid_argument("verify_solution: '" + v.name + "' not symmetric");
        if (v.is_composite() && m != materialize(v, vars, assignment))
            throw std::invalid_argument("verify_solution: ties violated for '" + v.name + "'");
        for (const auto& z : v.zeros)
            if (!m.block(z.row, z.col, z.rows, z.cols).isZero(0.0))
                throw std::invalid_argument("verify_solution: zero block violated for '" +
                                            v.name + "'");
    }
    return lambda_max_sym(evaluate(lmi, vars, assignment));
}

namespace {

struct CertificateCheck {
    bool ok = false;
    std::vector<double> lmi_lambda_max;
    double worst = 0.0;
};

CertificateCheck certify(const std::vector<BlockLmi>& lmis,
                         const std::vector<MatrixVariable>& vars, const Assignment& assignment,
                         double margin) {
    CertificateCheck c;
    c.ok = true;
    c.worst = -std::numeric_limits<double>::infinity();
    for (const auto& lmi : lmis) {
        const double req = lmi.margin > 0.0 ? lmi.margin : margin;
        double lam = lambda_max_sym(evaluate(lmi, vars, assignment));
        c.lmi_lambda_max.push_back(lam);
        c.worst = std::max(c.worst, lam);
        if (!(lam <= -req)) c.ok = false;
    }
    for (const auto& v : vars) {
        if (v.structure == VarStructure::SymmetricPositiveDefinite) {
            if (!(lambda_min_sym(assignment.at(v.name)) >= margin)) c.ok = false;
        } else if (v.structure == VarStructure::ScalarPositive) {
            if (!(assignment.at(v.name)(0, 0) >= margin)) c.ok = false;
        }
    }
    return c;
}

}  // namespace

SolveResult solve_feasibility(const std::vector<BlockLmi>& lmis,
                              const std::vector<MatrixVariable>& vars, double margin,
                              const SolveOptions& options) {
    if (margin < 0.0) throw std::invalid_argument("solve_feasibility: margin must be >= 0");
    LoweredProblem low = lower_to_sdp(lmis, vars, margin);

    SolveResult out;
    Assignment accepted;
    CertificateCheck accepted_check;

    sdp::Options engine_options;
    engine_options.max_iterations = options.max_iterations;
    engine_options.tolerance = options.tolerance;
    engine_options.accept = [&](const Vec& y) {
        Assignment a = assignment_from_scalars(vars, y.head(low.num_scalars));
        CertificateCheck c = certify(lmis, vars, a, margin);
        if (c.ok) {
            accepted = std::move(a);
            accepted_check = std::move(c);
        }
        return c.ok;
    };

    sdp::Result engine = sdp::solve(low.problem, engine_options);
    out.iterations = engine.iterations;

    switch (engine.status) {
        case sdp::Status::Accepted: {
            LmiSolution sol;
            sol.assignment = std::move(accepted);
            sol.lmi_lambda_max = accepted_check.lmi_lambda_max;
            sol.achieved_margin = -accepted_check.worst;
            sol.solver_status = SolveStatus::Success;
            sol.iterations = engine.iterations;
            for (const auto& v : vars)
                if (v.structure == VarStructure::ScalarPositive && v.name == "eps")
                    sol.eps = sol.assignment.at("eps")(0, 0);
            // certificate discipline: a Success solution must re-verify
            for (std::size_t i = 0; i < lmis.size(); ++i) {
                const double req = lmis[i].margin > 0.0 ? lmis[i].margin : margin;
                if (!(verify_solution(lmis[i], vars, sol.assignment) <= -req)) {
                    out.status = SolveStatus::NumericalFailure;
                    return out;
                }
            }
            out.status = SolveStatus::Success;
            out.solution = std::move(sol);
            return out;
        }
        case sdp::Status::Converged:
        case sdp::Status::IterationLimit:
            out.status = SolveStatus::Infeasible;
            return out;
        case sdp::Status::NumericalFailure:
            out.status = SolveStatus::NumericalFailure;
            return out;
    }
    return out;
}

AssembledLmi assemble_robust_lmi(const AugmentedDescriptor& aug) {
    const int n = aug.n;
    const int m = aug.m;
    const Mat I2n = Mat::Identity(2 * n, 2 * n);
    const Mat In = Mat::Identity(n, n);
    Mat Ihat = Mat::Zero(n, 2 * n);  // [I 0]
    Ihat.leftCols(n) = In;
    Mat Ssel = Mat::Zero(2 * n, n);  // [0; I]
    Ssel.bottomRows(n) = In;
    const Mat AE = aug.Ahat - aug.Ehat;

    AssembledLmi out;
    out.variables = {
        {"P", 2 * n, 2 * n, VarStructure::SymmetricPositiveDefinite, {}, {}},
        {"Q", 2 * n, n, VarStructure::Full, {}, {}},
        {"Z", m, n, VarStructure::Full, {}, {}},
        {"K", n, n, VarStructure::Full, {}, {}},
        {"H3", n, n, VarStructure::Full, {}, {}},
        {"H4", n, n, VarStructure::Full, {}, {}},
        {"G3", n, n, VarStructure::Full, {}, {}},
        {"G4", n, n, VarStructure::Full, {}, {}},
        {"eps", 1, 1, VarStructure::ScalarPositive, {}, {}},
        {"H",
         2 * n,
         2 * n,
         VarStructure::Full,
         {{0, 0, "K", TieTransform::Identity},
          {n, 0, "H3", TieTransform::Identity},
          {n, n, "H4", TieTransform::Identity}},
         {{0, n, n, n}}},
        {"G",
         2 * n,
         2 * n,
         VarStructure::Full,
         {{0, 0, "K", TieTransform::Identity},
          {n, 0, "G3", TieTransform::Identity},
          {n, n, "G4", TieTransform::Identity}},
         {{0, n, n, n}}},
    };

    BlockLmi lmi("robust", {2 * n, 2 * n, n});
    lmi.block(0, 0)
        .add(AE, "H", I2n)
        .add(I2n, "H", AE.transpose(), true)
        .add(aug.Bhat, "Z", Ihat)
        .add(Ihat.transpose(), "Z", aug.Bhat.transpose(), true);
    lmi.block(0, 1)
        .add(aug.Ehat, "P", I2n)
        .add(I2n, "Q", Ssel.transpose())
        .add(-I2n, "H", I2n, true)
        .add(AE, "G", I2n)
        .add(aug.Bhat, "Z", Ihat);
    lmi.block(0, 2)
        .add(I2n, "H", aug.Ka_hat.transpose(), true)
        .add(Ihat.transpose(), "Z", aug.Kb_hat.transpose(), true);
    lmi.block(1, 1).add(-I2n, "G", I2n).add(-I2n, "G", I2n, true).add(I2n, "P", I2n);
    lmi.block(1, 2)
        .add(I2n, "G", aug.Ka_hat.transpose(), true)
        .add(Ihat.transpose(), "Z", aug.Kb_hat.transpose(), true);
    lmi.block(2, 2).add(-In, "eps", In);

    out.lmi = std::move(lmi);
    return out;
}

AssembledLmi assemble_model_robust(const AugmentedDescriptor& aug, const Mat& Bwd) {
    if (Bwd.rows() != aug.n) throw std::invalid_argument("assemble_model_robust: Bwd rows != n");
    AssembledLmi out = assemble_robust_lmi(aug);
    Mat Bw_hat = Mat::Zero(2 * aug.n, Bwd.cols());
    Bw_hat.bottomRows(aug.n) = Bwd;
    out.lmi.name = "robust_model";
    out.lmi.block(0, 0).add(Bw_hat, "eps", Bw_hat.transpose());
    return out;
}

AssembledLmi assemble_hinf_lmi(const AugmentedDescriptor& aug, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("assemble_hinf_lmi: gamma must be positive");
    const int n = aug.n;
    const int m = aug.m;
    const int p = aug.p;
    const Mat In = Mat::Identity(n, n);
    Mat U1 = Mat::Zero(2 * n, n);
    U1.topRows(n) = In;
    Mat U2 = Mat::Zero(2 * n, n);
    U2.bottomRows(n) = In;

    const Mat Ed = -aug.Ahat.bottomRightCorner(n, n);
    const Mat Ad = aug.Ahat.bottomLeftCorner(n, n);
    const Mat Bd = aug.Bhat.bottomRows(n);
    const Mat Cd = aug.Chat.leftCols(n);
    const Mat& Dd = aug.Dhat;
    const Mat Ke = -aug.Ka_hat.rightCols(n);

    AssembledLmi out;
    out.variables = {
        {"P1", n, n, VarStructure::SymmetricPositiveDefinite, {}, {}},
        {"P4", n, n, VarStructure::SymmetricPositiveDefinite, {}, {}},
        {"S1", n, n, VarStructure::Full, {}, {}},
        {"S2", n, n, VarStructure::Full, {}, {}},
        {"K1", m, n, VarStructure::Full, {}, {}},
        {"eps", 1, 1, VarStructure::ScalarPositive, {}, {}},
    };

    BlockLmi lmi("hinf", {2 * n, p, 2 * n, n});
    lmi.block(0, 0)
        .add(U1, "S1", U1.transpose())
        .add(U1, "S1", U1.transpose(), true)
        .add(-U1, "P1", U1.transpose())
        .add(U1, "S1", -Ed.transpose() * U2.transpose())
        .add(U1, "S2", U2.transpose(), true)
        .add(-U2 * Ed, "S1", U1.transpose(), true)
        .add(U2, "S2", U1.transpose())
        .add(-U2 * Ed, "S2", U2.transpose(), true)
        .add(U2, "S2", -Ed.transpose() * U2.transpose());
    lmi.block(0, 2)
        .add(-U1, "P4", U2.transpose())
        .add(U2 * Ad, "P1", U1.transpose())
        .add(U2 * Bd, "K1", U1.transpose())
        .add(-U2 * Ed, "P4", U2.transpose());
    lmi.block(0, 3).add(U1, "S1", -Ke.transpose()).add(U2, "S2", -Ke.transpose());
    lmi.block(1, 1).add_const(-gamma * gamma * Mat::Identity(p, p));
    lmi.block(1, 2).add(Cd, "P1", U1.transpose()).add(Dd, "K1", U1.transpose());
    lmi.block(2, 2).add(-U1, "P1", U1.transpose()).add(-U2, "P4", U2.transpose());
    lmi.block(3, 3).add(-In, "eps", In);

    out.lmi = std::move(lmi);
    return out;
}

AssembledLmi assemble_model_hinf(const Mat& Ehat, const Mat& Ahat_closed, const Mat& Bw_hat,
                                 const Mat& Chat_closed, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("assemble_model_hinf: gamma must be positive");
    const auto two_n = Ehat.rows();
    if (two_n % 2 != 0 || Ehat.cols() != two_n)
        throw std::invalid_argument("assemble_model_hinf: Ehat must be 2n x 2n");
    const auto n = two_n / 2;
    const auto q = Bw_hat.cols();
    const auto p = Chat_closed.rows();

    Mat Rhat = Mat::Zero(two_n, n);  // full column rank with Ehat' Rhat = 0
    Rhat.bottomRows(n) = Mat::Identity(n, n);
    if (!(Ehat.transpose() * Rhat).isZero(1e-12))
        throw std::invalid_argument("assemble_model_hinf: Ehat' Rhat != 0");

    AssembledLmi out;
    out.variables = {
        {"Phat", two_n, two_n, VarStructure::SymmetricPositiveDefinite, {}, {}},
        {"Shat", two_n, n, VarStructure::Full, {}, {}},
    };

    const Mat I2n = Mat::Identity(two_n, two_n);
    BlockLmi lmi("hinf_model", {two_n, q, two_n, p});
    lmi.block(0, 0)
        .add(I2n, "Shat", Rhat.transpose() * Ahat_closed)
        .add(Ahat_closed.transpose() * Rhat, "Shat", I2n, true)
        .add(-Ehat.transpose(), "Phat", Ehat);
    lmi.block(0, 1).add(I2n, "Shat", Rhat.transpose() * Bw_hat);
    lmi.block(0, 2).add(Ahat_closed.transpose(), "Phat", I2n);
    lmi.block(0, 3).add_const(Chat_closed.transpose());
    lmi.block(1, 1).add_const(-gamma * gamma * Mat::Identity(q, q));
    lmi.block(1, 2).add(Bw_hat.transpose(), "Phat", I2n);
    lmi.block(2, 2).add(-I2n, "Phat", I2n);
    lmi.block(3, 3).add_const(-Mat::Identity(p, p));

    out.lmi = std::move(lmi);
    return out;
}

std::string lmi_debug_json(const BlockLmi& lmi, const std::vector<MatrixVariable>& vars) {
    json j;
    j["name"] = lmi.name;
    j["block_dims"] = lmi.block_dims;
    json blocks = json::array();
    for (int i = 0; i < lmi.block_count(); ++i) {
        for (int jj = i; jj < lmi.block_count(); ++jj) {
            const AffineExpr* e = lmi.block_ptr(i, jj);
            if (!e) continue;
            json b;
            b["row"] = i;
            b["col"] = jj;
            std::vector<std::vector<double>> c(e->constant.rows());
            for (Eigen::Index r = 0; r < e->constant.rows(); ++r)
                for (Eigen::Index cc = 0; cc < e->constant.cols(); ++cc)
                    c[r].push_back(e->constant(r, cc));
            b["constant"] = c;
            json terms = json::array();
            for (const auto& t : e->terms)
                terms.push_back({{"var", t.var},
                                 {"transposed", t.transpose_var},
                                 {"left", {t.left.rows(), t.left.cols()}},
                                 {"right", {t.right.rows(), t.right.cols()}}});
            b["terms"] = terms;
            blocks.push_back(b);
        }
    }
    j["blocks"] = blocks;
    json vs = json::array();
    for (const auto& v : vars) {
        json vj;
        vj["name"] = v.name;
        vj["rows"] = v.rows;
        vj["cols"] = v.cols;
        switch (v.structure) {
            case VarStructure::Full: vj["structure"] = "full"; break;
            case VarStructure::Symmetric: vj["structure"] = "symmetric"; break;
            case VarStructure::SymmetricPositiveDefinite:
                vj["structure"] = "symmetric-positive-definite";
                break;
            case VarStructure::ScalarPositive: vj["structure"] = "scalar-positive"; break;
        }
        vs.push_back(vj);
    }
    j["variables"] = vs;
    return j.dump(2);
}

}  // namespace ddc
