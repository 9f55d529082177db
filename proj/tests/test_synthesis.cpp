#include "gradflow/synthesis.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace gradflow;
using namespace gradflow::testing;

namespace {

constexpr double kTol = 1e-9;

GeneralisedSystemProbe linear_probe(const Matrix& K, const Matrix& B, const Vector& pi) {
    GeneralisedSystemProbe p;
    p.dim = pi.size();
    p.pi = pi;
    p.grad_F = [B, pi](const Vector& x) -> Vector { return B * (x - pi); };
    p.psi_star_grad = [K](const Vector&, const Vector& xi) -> Vector { return K * xi; };
    return p;
}

TEST(SynthesizeCanonical, OrthonormalVGivesClassicalGradientFlow) {
    Vector f(2);
    f << -1, -2;
    const auto diag = Diagonalisation::from(Matrix::Identity(2, 2), f);
    const auto gs = synthesize_canonical(diag);
    EXPECT_TRUE(gs.K.isApprox(Matrix::Identity(2, 2)));
    Matrix B = Matrix::Zero(2, 2);
    B.diagonal() << 1, 2;
    EXPECT_TRUE(gs.B.isApprox(B));
    EXPECT_EQ(gs.pi, Vector::Zero(2));
    Vector x(2);
    x << 1.0, 1.0;
    EXPECT_DOUBLE_EQ(gs.energy(x), 0.5 * (1.0 + 2.0));
}

TEST(SynthesizeCanonical, NonReversibleChainSatisfiesFlowIdentity) {
    const Matrix A = nonreversible_chain();
    const auto gs = synthesize_canonical(real_diagonalise(A));
    EXPECT_TRUE(is_spd(gs.K));
    EXPECT_LE((gs.B - gs.B.transpose()).norm(), 1e-15 * gs.B.norm());
    EXPECT_LE(verify_flow_identity(A, gs).max_residual, 1e-12);

    // The published pair is a different, equally valid structure.
    const CanonicalGradientSystem published{published_K(), published_B(), Vector::Zero(3)};
    EXPECT_LE(verify_flow_identity(A, published).max_residual, 1e-12);
}

TEST(SynthesizeCanonical, ZeroMultiplierGivesZeroEnergy) {
    std::mt19937_64 rng(1);
    const auto diag = Diagonalisation::from(random_V(4, 10.0, rng), Vector::Zero(4));
    const auto gs = synthesize_canonical(diag);
    EXPECT_LE(gs.B.norm(), 1e-15);
    EXPECT_EQ(verify_flow_identity(Matrix::Zero(4, 4), gs).max_residual, 0.0);
}

TEST(SynthesizeCanonical, IllConditionedV) {
    Matrix V = Matrix::Identity(2, 2);
    V(1, 1) = 1e-12;
    const auto diag = Diagonalisation::from(V, Vector::Ones(2));
    try {
        (void)synthesize_canonical(diag);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
    }
}

TEST(SynthesizeProperty, FlowIdentityAndSpdK) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 1 + trial % 15;
        const auto diag = Diagonalisation::from(random_V(d, 1e3, rng), random_f(d, -5.0, 5.0, rng));
        const Matrix A = diag.reconstruct();
        const auto gs = synthesize_canonical(diag);
        EXPECT_LE(verify_flow_identity(A, gs).max_residual, 1e-9) << trial;
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(gs.K).eigenvalues()(0), 0.0);
        EXPECT_EQ(gs.gradient(Vector::Zero(d)), Vector::Zero(d));
        // <xi, K xi> = |V^{-T} xi|^2
        const Vector xi = Vector::Random(d);
        EXPECT_NEAR(xi.dot(gs.K * xi), (diag.V_inv.transpose() * xi).squaredNorm(), 1e-9 * xi.dot(gs.K * xi));
    }
}

TEST(SynthesizeProperty, SymmetricAGivesIdentityK) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 2 + trial % 6;
        const Matrix Q = random_orthogonal(d, rng);
        const Matrix A = Q * random_f(d, -3.0, 3.0, rng).asDiagonal() * Q.transpose();
        const auto gs = synthesize_canonical(real_diagonalise(A));
        EXPECT_LE((gs.K - Matrix::Identity(d, d)).norm(), 1e-9);
        EXPECT_LE((gs.B + A).norm(), 1e-9 * A.norm());
    }
}

TEST(RecoverDiagonalisation, IdentityOnsager) {
    Matrix B = Matrix::Zero(2, 2);
    B.diagonal() << 1, 2;
    const CanonicalGradientSystem gs{Matrix::Identity(2, 2), B, Vector::Zero(2)};
    const auto diag = recover_diagonalisation(gs, -B);
    EXPECT_NEAR(diag.f(0), -2.0, 1e-14);
    EXPECT_NEAR(diag.f(1), -1.0, 1e-14);
    EXPECT_TRUE((diag.V * diag.V.transpose()).isApprox(Matrix::Identity(2, 2)));
}

TEST(RecoverDiagonalisation, PublishedNonReversiblePair) {
    const CanonicalGradientSystem gs{published_K(), published_B(), Vector::Zero(3)};
    const Matrix A = nonreversible_chain();
    const auto diag = recover_diagonalisation(gs, A, 1e-12);
    // roots of t(t + 3)(t + 6), see the characteristic-polynomial oracle
    EXPECT_NEAR(diag.f(0), -6.0, 1e-12);
    EXPECT_NEAR(diag.f(1), -3.0, 1e-12);
    EXPECT_NEAR(diag.f(2), 0.0, 1e-12);
    EXPECT_LE((A - diag.reconstruct()).norm(), 1e-12 * A.norm());
}

TEST(RecoverDiagonalisation, Errors) {
    const CanonicalGradientSystem gs{published_K(), published_B(), Vector::Zero(3)};
    Matrix A = nonreversible_chain();
    A(0, 0) += 1e-3;
    try {
        (void)recover_diagonalisation(gs, A);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FlowMismatch);
    }

    // A non-symmetric "Hessian" with A = -K B: S^{-1} A S = -S B S is not symmetric.
    Matrix B(2, 2);
    B << 1, 2, 0, 1;
    const CanonicalGradientSystem bad{Matrix::Identity(2, 2), B, Vector::Zero(2)};
    try {
        (void)recover_diagonalisation(bad, -B);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AsymmetryDefect);
    }
}

TEST(RecoverProperty, RoundTripThroughSynthesis) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index d = 1 + trial % 12;
        const Vector f = random_f(d, -4.0, 4.0, rng);
        const auto diag = Diagonalisation::from(random_V(d, 1e3, rng), f);
        const Matrix A = diag.reconstruct();
        const auto gs = synthesize_canonical(diag);
        const auto back = recover_diagonalisation(gs, A, 1e-8);
        EXPECT_LE((sorted(back.f) - f).cwiseAbs().maxCoeff(), 1e-6) << trial;
        EXPECT_LE((A - back.reconstruct()).norm(), 1e-8 * A.norm()) << trial;
    }
}

TEST(LineariseGeneralised, LinearProbeIsRecovered) {
    Matrix K(2, 2), B(2, 2);
    K << 2, 0.5, 0.5, 1;
    B << 1, 0.2, 0.2, 3;
    Vector pi(2);
    pi << 0.5, -1.0;
    const auto gs = linearise_generalised(linear_probe(K, B, pi), default_fd_step(pi));
    EXPECT_LE((gs.K - K).norm(), 1e-9);
    EXPECT_LE((gs.B - B).norm(), 1e-9);
    EXPECT_EQ(gs.pi, pi);
}

TEST(LineariseGeneralised, SuppliedHessiansTakePrecedence) {
    Matrix K = Matrix::Identity(2, 2), B = Matrix::Identity(2, 2);
    auto probe = linear_probe(K, B, Vector::Zero(2));
    probe.hess_F_at_pi = 2.0 * B;
    probe.psi_star_hess_at_pi0 = 3.0 * K;
    const auto gs = linearise_generalised(probe, 1e-5);
    EXPECT_EQ(gs.B, 2.0 * B);
    EXPECT_EQ(gs.K, 3.0 * K);
}

TEST(LineariseGeneralised, ConstantFreeEnergy) {
    GeneralisedSystemProbe p;
    p.dim = 2;
    p.pi = Vector::Zero(2);
    p.grad_F = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
    p.psi_star_grad = [](const Vector&, const Vector& xi) -> Vector { return xi; };
    const auto gs = linearise_generalised(p, 1e-5);
    EXPECT_EQ(gs.B, Matrix::Zero(2, 2));
    EXPECT_EQ(gs.generator(), Matrix::Zero(2, 2));
}

TEST(LineariseGeneralised, Errors) {
    Matrix K = Matrix::Identity(2, 2);
    auto not_critical = linear_probe(K, K, Vector::Zero(2));
    not_critical.grad_F = [](const Vector& x) -> Vector { return x + Vector::Ones(x.size()); };
    try {
        (void)linearise_generalised(not_critical, 1e-5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCritical);
    }

    Matrix indefinite(2, 2);
    indefinite << 1, 0, 0, -1;
    try {
        (void)linearise_generalised(linear_probe(indefinite, K, Vector::Zero(2)), 1e-5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSPD);
    }

    EXPECT_THROW((void)linearise_generalised(linear_probe(K, K, Vector::Zero(2)), 0.0), Error);
}

TEST(LineariseGeneralised, ConservedDirections) {
    // K = graph Laplacian of a path: PSD with kernel span{1}
    Matrix K(3, 3);
    K << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    auto probe = linear_probe(K, Matrix::Identity(3, 3), Vector::Zero(3));
    try {
        (void)linearise_generalised(probe, 1e-5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSPD);
    }
    probe.conserved = Vector::Ones(3);
    const auto gs = linearise_generalised(probe, 1e-5);
    EXPECT_LE((gs.K - K).norm(), 1e-9);

    // a declared direction that K does not annihilate
    probe.conserved = Vector::Unit(3, 0);
    EXPECT_THROW((void)linearise_generalised(probe, 1e-5), Error);

    // rank d - 2 with one conserved direction
    Matrix K2 = Matrix::Zero(3, 3);
    K2(0, 0) = K2(1, 1) = 1.0;
    K2(0, 1) = K2(1, 0) = -1.0;
    auto probe2 = linear_probe(K2, Matrix::Identity(3, 3), Vector::Zero(3));
    probe2.conserved = Vector::Ones(3);
    EXPECT_THROW((void)linearise_generalised(probe2, 1e-5), Error);
}

TEST(LineariseGeneralised, FiniteDifferenceDefectIsSecondOrder) {
    // grad F(x) = sin(x) componentwise around pi = 0: D^2 F(0) = I, F''' != 0.
    GeneralisedSystemProbe p;
    p.dim = 2;
    p.pi = Vector::Zero(2);
    p.grad_F = [](const Vector& x) -> Vector { return x.array().sin().matrix() + 0.5 * x.array().pow(3).matrix(); };
    p.psi_star_grad = [](const Vector&, const Vector& xi) -> Vector { return xi; };
    auto defect = [&](double h) { return (linearise_generalised(p, h).B - Matrix::Identity(2, 2)).norm(); };
    // central differences of g = DF miss g'''(0) h^2 / 6 = h^2 / 3 per diagonal entry
    const double ratio = defect(1e-2) / defect(5e-3);
    EXPECT_GE(ratio, 3.0);
    EXPECT_LE(ratio, 5.0);
}

TEST(VerifyFlowIdentity, Examples) {
    const CanonicalGradientSystem gs{published_K(), published_B(), Vector::Zero(3)};
    const auto ok = verify_flow_identity(nonreversible_chain(), gs);
    EXPECT_LE(ok.max_residual, 1e-12);
    EXPECT_TRUE(ok.passed);

    const Matrix built = -gs.K * gs.B;
    EXPECT_LE(verify_flow_identity(built, gs).max_residual, 1e-15);

    Matrix perturbed = nonreversible_chain();
    perturbed(1, 2) += 1e-3;
    const auto bad = verify_flow_identity(perturbed, gs, 1e-9);
    EXPECT_FALSE(bad.passed);
    // |K B + A| = 1e-3 exactly up to rounding; divided by |A|_F
    EXPECT_NEAR(bad.max_residual, 1e-3 / perturbed.norm(), 1e-12);
}

}  // namespace
