#include "helpers.hpp"

#include <ddc/lmi.hpp>

#include <Eigen/Eigenvalues>

using namespace ddc;
using ddct::bench_config;
using ddct::bench_plant;
using ddct::max_abs;
using ddct::random_mat;
using ddct::random_sym;

namespace {

double lam_max(const Mat& m) {
    Mat s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

AugmentedDescriptor bench_aug(double delta, std::uint64_t seed) {
    return augment(ddct::bench_descriptor(delta, seed));
}

Assignment random_robust_assignment(RngStream& rng, int n, int m, double eps) {
    Assignment a;
    a["P"] = random_sym(rng, 2 * n);
    a["Q"] = random_mat(rng, 2 * n, n);
    a["Z"] = random_mat(rng, m, n);
    a["K"] = random_mat(rng, n, n);
    a["H3"] = random_mat(rng, n, n);
    a["H4"] = random_mat(rng, n, n);
    a["G3"] = random_mat(rng, n, n);
    a["G4"] = random_mat(rng, n, n);
    Mat e(1, 1);
    e(0, 0) = eps;
    a["eps"] = e;
    return a;
}

Assignment zero_robust_assignment(int n, int m) {
    Assignment a;
    a["P"] = Mat::Zero(2 * n, 2 * n);
    a["Q"] = Mat::Zero(2 * n, n);
    a["Z"] = Mat::Zero(m, n);
    a["K"] = Mat::Zero(n, n);
    a["H3"] = Mat::Zero(n, n);
    a["H4"] = Mat::Zero(n, n);
    a["G3"] = Mat::Zero(n, n);
    a["G4"] = Mat::Zero(n, n);
    a["eps"] = Mat::Zero(1, 1);
    return a;
}

}  // namespace

TEST_CASE("robust LMI: dimension audit (5n total)") {
    AssembledLmi assembled = assemble_robust_lmi(bench_aug(0.2, 1));
    CHECK(assembled.lmi.dim() == 15);
    CHECK(assembled.lmi.block_dims == std::vector<Eigen::Index>{6, 6, 3});
}

TEST_CASE("robust LMI: zero assignment evaluates to zero; P/eps produce the diagonal pattern") {
    AugmentedDescriptor aug = bench_aug(0.2, 2);
    AssembledLmi assembled = assemble_robust_lmi(aug);
    const int n = aug.n;

    Assignment zero = zero_robust_assignment(n, aug.m);
    CHECK(max_abs(evaluate(assembled.lmi, assembled.variables, zero)) == 0.0);

    Assignment diag = zero_robust_assignment(n, aug.m);
    diag["P"] = 2.0 * Mat::Identity(2 * n, 2 * n);
    diag["eps"](0, 0) = 3.0;
    Mat got = evaluate(assembled.lmi, assembled.variables, diag);

    // hand expansion: (0,1) = Ehat P, (1,1) = P, (2,2) = -eps I
    Mat expected = Mat::Zero(5 * n, 5 * n);
    expected.block(0, 2 * n, 2 * n, 2 * n) = aug.Ehat * diag["P"];
    expected.block(2 * n, 0, 2 * n, 2 * n) = (aug.Ehat * diag["P"]).transpose();
    expected.block(2 * n, 2 * n, 2 * n, 2 * n) = diag["P"];
    expected.block(4 * n, 4 * n, n, n) = -3.0 * Mat::Identity(n, n);
    CHECK(max_abs(got - expected) <= 1e-14);
}

TEST_CASE("robust LMI: scalar toy matches the hand expansion") {
    DescriptorData d;
    d.n = 1;
    d.m = 1;
    d.Ed = Mat::Zero(1, 1);
    d.Ad = Mat::Zero(1, 1);
    d.Bd = Mat::Zero(1, 1);
    d.Cd = Mat::Zero(1, 1);
    d.Dd = Mat::Zero(1, 1);
    d.Ke = Mat::Zero(1, 1);
    d.Ka = Mat::Zero(1, 1);
    d.Kb = Mat::Zero(1, 1);
    AssembledLmi assembled = assemble_robust_lmi(augment(d));

    Assignment a = zero_robust_assignment(1, 1);
    a["K"](0, 0) = 1.0;
    a["H4"](0, 0) = 1.0;
    a["G4"](0, 0) = 1.0;  // H = G = I
    Mat got = evaluate(assembled.lmi, assembled.variables, a);

    Mat expected{{-2, 1, -2, 1, 0},
                 {1, 0, 0, -1, 0},
                 {-2, 0, -2, 0, 0},
                 {1, -1, 0, -2, 0},
                 {0, 0, 0, 0, 0}};
    CHECK(max_abs(got - expected) <= 1e-14);
}

TEST_CASE("model robust LMI: reduces to the data LMI for a zero channel") {
    AugmentedDescriptor aug = bench_aug(0.2, 3);
    AssembledLmi data_lmi = assemble_robust_lmi(aug);
    AssembledLmi model_zero = assemble_model_robust(aug, Mat::Zero(aug.n, 3));

    RngStream rng(5);
    Assignment a = random_robust_assignment(rng, aug.n, aug.m, 0.7);
    Mat lhs = evaluate(model_zero.lmi, model_zero.variables, a);
    Mat rhs = evaluate(data_lmi.lmi, data_lmi.variables, a);
    CHECK(max_abs(lhs - rhs) <= 1e-14);
}

TEST_CASE("model robust LMI: difference is exactly the epsilon channel block") {
    AugmentedDescriptor aug = bench_aug(0.2, 4);
    RngStream rng(6);
    Mat Bwd = random_mat(rng, aug.n, 3);
    AssembledLmi data_lmi = assemble_robust_lmi(aug);
    AssembledLmi model = assemble_model_robust(aug, Bwd);

    for (double eps : {0.0, 0.9, 2.5}) {
        Assignment a = random_robust_assignment(rng, aug.n, aug.m, eps);
        Mat diff = evaluate(model.lmi, model.variables, a) -
                   evaluate(data_lmi.lmi, data_lmi.variables, a);
        Mat Bw_hat = Mat::Zero(2 * aug.n, 3);
        Bw_hat.bottomRows(aug.n) = Bwd;
        Mat expected = Mat::Zero(5 * aug.n, 5 * aug.n);
        expected.topLeftCorner(2 * aug.n, 2 * aug.n) = eps * Bw_hat * Bw_hat.transpose();
        CHECK(max_abs(diff - expected) <= 1e-12);
    }
}

TEST_CASE("model vs data robust LMI: monotone largest eigenvalue") {
    AugmentedDescriptor aug = bench_aug(0.5, 7);
    RngStream rng(8);
    Mat Bwd = random_mat(rng, aug.n, 3);
    AssembledLmi data_lmi = assemble_robust_lmi(aug);
    AssembledLmi model = assemble_model_robust(aug, Bwd);
    for (int trial = 0; trial < 10; ++trial) {
        Assignment a = random_robust_assignment(rng, aug.n, aug.m, rng.next_uniform() * 3.0);
        double lam_data = lam_max(evaluate(data_lmi.lmi, data_lmi.variables, a));
        double lam_model = lam_max(evaluate(model.lmi, model.variables, a));
        CHECK(lam_data <= lam_model + 1e-12);
    }
}

TEST_CASE("hinf LMI: dimension audit (5n + p total)") {
    AssembledLmi assembled = assemble_hinf_lmi(bench_aug(0.2, 9), 0.5);
    CHECK(assembled.lmi.dim() == 17);
    CHECK(assembled.lmi.block_dims == std::vector<Eigen::Index>{6, 2, 6, 3});
    CHECK_THROWS_AS(assemble_hinf_lmi(bench_aug(0.2, 9), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hinf_lmi(bench_aug(0.2, 9), -1.0), std::invalid_argument);
}

TEST_CASE("hinf LMI: leading block evaluation oracle") {
    // Ed = I, S1 = S2 = 0, P1 = P4 = I: Psi_11 = [[-I, 0], [0, 0]]
    DescriptorData d;
    d.n = 2;
    d.m = 1;
    d.Ed = Mat::Identity(2, 2);
    d.Ad = Mat::Zero(2, 2);
    d.Bd = Mat::Zero(2, 1);
    d.Cd = Mat::Zero(1, 2);
    d.Dd = Mat::Zero(1, 1);
    d.Ke = Mat::Zero(2, 2);
    d.Ka = Mat::Zero(2, 2);
    d.Kb = Mat::Zero(2, 1);
    AssembledLmi assembled = assemble_hinf_lmi(augment(d), 1.0);

    Assignment a;
    a["P1"] = Mat::Identity(2, 2);
    a["P4"] = Mat::Identity(2, 2);
    a["S1"] = Mat::Zero(2, 2);
    a["S2"] = Mat::Zero(2, 2);
    a["K1"] = Mat::Zero(1, 2);
    a["eps"] = Mat::Zero(1, 1);
    Mat got = evaluate(assembled.lmi, assembled.variables, a);
    Mat lead = got.topLeftCorner(4, 4);
    Mat expected = Mat::Zero(4, 4);
    expected.topLeftCorner(2, 2) = -Mat::Identity(2, 2);
    CHECK(max_abs(lead - expected) <= 1e-14);
}

TEST_CASE("hinf LMI: the uncertainty column is independent of K1") {
    AugmentedDescriptor aug = bench_aug(0.2, 10);
    AssembledLmi assembled = assemble_hinf_lmi(aug, 0.5);
    const int n = aug.n, p = aug.p;

    RngStream rng(11);
    Assignment a;
    a["P1"] = random_sym(rng, n);
    a["P4"] = random_sym(rng, n);
    a["S1"] = random_mat(rng, n, n);
    a["S2"] = random_mat(rng, n, n);
    a["K1"] = random_mat(rng, aug.m, n);
    a["eps"] = Mat::Ones(1, 1);
    Mat before = evaluate(assembled.lmi, assembled.variables, a);
    a["K1"] = random_mat(rng, aug.m, n);
    Mat after = evaluate(assembled.lmi, assembled.variables, a);

    // block (0,3): rows [0, 2n), cols [2n + p + 2n, 5n + p)
    Mat col_before = before.block(0, 4 * n + p, 2 * n, n);
    Mat col_after = after.block(0, 4 * n + p, 2 * n, n);
    CHECK(col_before == col_after);
}

TEST_CASE("assembled LMIs are symmetric at random assignments") {
    AugmentedDescriptor aug = bench_aug(0.2, 12);
    AssembledLmi robust = assemble_robust_lmi(aug);
    AssembledLmi hinf = assemble_hinf_lmi(aug, 0.5);
    RngStream rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        Assignment a = random_robust_assignment(rng, aug.n, aug.m, 1.0);
        Mat m = evaluate(robust.lmi, robust.variables, a);
        CHECK(max_abs(m - m.transpose()) <= 1e-12);

        Assignment b;
        b["P1"] = random_sym(rng, aug.n);
        b["P4"] = random_sym(rng, aug.n);
        b["S1"] = random_mat(rng, aug.n, aug.n);
        b["S2"] = random_mat(rng, aug.n, aug.n);
        b["K1"] = random_mat(rng, aug.m, aug.n);
        b["eps"] = Mat::Ones(1, 1);
        Mat h = evaluate(hinf.lmi, hinf.variables, b);
        CHECK(max_abs(h - h.transpose()) <= 1e-12);
    }
}

TEST_CASE("lowering soundness: standard form equals direct grid evaluation") {
    AugmentedDescriptor aug = bench_aug(0.2, 14);
    AssembledLmi assembled = assemble_robust_lmi(aug);
    const double margin = 1e-6;
    LoweredProblem low = lower_to_sdp({assembled.lmi}, assembled.variables, margin);

    RngStream rng(15);
    for (int trial = 0; trial < 5; ++trial) {
        Vec x(low.num_scalars);
        for (int i = 0; i < low.num_scalars; ++i) x(i) = 2.0 * rng.next_uniform() - 1.0;
        // block 0 is the LMI: H(x) + margin I = -C + sum_i x_i A_i
        Mat lowered = -low.problem.C[0];
        for (int i = 0; i < low.num_scalars; ++i)
            lowered += x(i) * low.problem.A[0][i];
        Assignment a = assignment_from_scalars(assembled.variables, x);
        Mat direct = evaluate(assembled.lmi, assembled.variables, a) +
                     margin * Mat::Identity(assembled.lmi.dim(), assembled.lmi.dim());
        CHECK(max_abs(lowered - 0.5 * (direct + direct.transpose())) <= 1e-10);
    }
}

TEST_CASE("verify_solution: zero LMI has zero margin; corruption is flagged") {
    BlockLmi zero_lmi("zero", {2});
    zero_lmi.block(0, 0).add_const(Mat::Zero(2, 2));
    CHECK(verify_solution(zero_lmi, {}, {}) == 0.0);

    // composite tie violation is rejected exactly
    AugmentedDescriptor aug = bench_aug(0.2, 16);
    AssembledLmi assembled = assemble_robust_lmi(aug);
    RngStream rng(17);
    Assignment a = random_robust_assignment(rng, aug.n, aug.m, 1.0);
    a["H"] = materialize(assembled.variables[9], assembled.variables, a);
    a["G"] = materialize(assembled.variables[10], assembled.variables, a);
    CHECK_NOTHROW(verify_solution(assembled.lmi, assembled.variables, a));
    a["H"](0, 0) += 1.0;
    CHECK_THROWS_AS(verify_solution(assembled.lmi, assembled.variables, a),
                    std::invalid_argument);
}

TEST_CASE("petersen_sufficient: trivial cases") {
    Mat Zneg = -Mat::Identity(3, 3);
    Mat X0 = Mat::Zero(3, 2);
    Mat Y0 = Mat::Zero(2, 3);
    for (double eps : {0.1, 1.0, 50.0}) CHECK(petersen_sufficient(Zneg, X0, Y0, eps));
    Mat Zzero = Mat::Zero(3, 3);
    for (double eps : {0.1, 1.0, 50.0}) CHECK_FALSE(petersen_sufficient(Zzero, X0, Y0, eps));
    CHECK_THROWS_AS(petersen_sufficient(Zneg, X0, Y0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(petersen_sufficient(Zneg, X0, Y0, -1.0), std::invalid_argument);
}

TEST_CASE("petersen_sufficient: sampled admissible uncertainties stay negative definite") {
    RngStream rng(19);
    int positives = 0;
    for (int instance = 0; instance < 30; ++instance) {
        int d = 2 + static_cast<int>(rng.next_u64() % 5);
        int a = 1 + static_cast<int>(rng.next_u64() % 5);
        int b = 1 + static_cast<int>(rng.next_u64() % 5);
        Mat R = random_mat(rng, d, d);
        Mat Z = -(0.4 * Mat::Identity(d, d) + R * R.transpose() * 0.3);
        Mat X = 0.4 * random_mat(rng, d, a);
        Mat Y = 0.4 * random_mat(rng, b, d);
        double eps = 0.5 + rng.next_uniform();
        if (!petersen_sufficient(Z, X, Y, eps)) continue;
        ++positives;
        for (int s = 0; s < 200; ++s) {
            Mat G = random_mat(rng, a, b);
            Eigen::JacobiSVD<Mat> svd(G);
            Mat Delta = G / (svd.singularValues()(0) * (1.0 + rng.next_uniform()));
            Mat uncertain = Z + X * Delta * Y + (X * Delta * Y).transpose();
            CHECK(lam_max(uncertain) < 0.0);
        }
    }
    CHECK(positives > 5);  // the generator must actually exercise the property
}

TEST_CASE("lmi_debug_json: dumps block shapes and variables") {
    AssembledLmi assembled = assemble_robust_lmi(bench_aug(0.2, 20));
    std::string dump = lmi_debug_json(assembled.lmi, assembled.variables);
    CHECK(dump.find("\"robust\"") != std::string::npos);
    CHECK(dump.find("\"eps\"") != std::string::npos);
    CHECK(dump.find("block_dims") != std::string::npos);
}
