#include "gradflow/flow.hpp"
#include "gradflow/sampling.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace gradflow;
using namespace gradflow::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

struct Example2 {
    Matrix A = nonreversible_chain();
    Diagonalisation diag = real_diagonalise(A);
    CanonicalGradientSystem gs = synthesize_canonical(diag);
    MetricContext ctx = MetricContext::from(diag);
    Vector x0 = vec({0.6, 0.3, 0.1});
};

TEST(ExactFlow, Examples) {
    const auto diag = Diagonalisation::from(Matrix::Identity(2, 2), vec({-1, 0}));
    const Vector x0 = vec({1, 1});
    EXPECT_EQ(exact_flow(diag, x0, 0.0), x0);
    const Vector x = exact_flow(diag, x0, std::log(2.0));
    EXPECT_NEAR(x(0), 0.5, 1e-15);
    EXPECT_NEAR(x(1), 1.0, 1e-15);
}

TEST(ExactFlow, ReversibleChainRelaxesToUniform) {
    const auto diag = real_diagonalise(reversible_chain());
    const Vector x = exact_flow(diag, vec({1, 0, 0}), 50.0);
    EXPECT_TRUE(x.isApprox(Vector::Constant(3, 1.0 / 3.0), 1e-12));
}

TEST(ExactFlow, OverflowGuard) {
    const auto diag = Diagonalisation::from(Matrix::Identity(1, 1), vec({1.0}));
    EXPECT_NO_THROW((void)exact_flow(diag, vec({1.0}), 699.0));
    try {
        (void)exact_flow(diag, vec({1.0}), 701.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Overflow);
    }
    // backwards in time the decaying mode is the one that grows
    const auto decay = Diagonalisation::from(Matrix::Identity(1, 1), vec({-1.0}));
    EXPECT_NEAR(exact_flow(decay, vec({1.0}), -1.0)(0), std::exp(1.0), 1e-14);
}

TEST(ExactFlowProperty, Semigroup) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 1 + trial % 8;
        const auto diag = Diagonalisation::from(random_V(d, 100.0, rng), random_f(d, -3.0, 1.0, rng));
        const Vector x0 = Vector::Random(d);
        const double t = u(rng), s = u(rng);
        const Vector direct = exact_flow(diag, x0, t + s);
        const Vector composed = exact_flow(diag, exact_flow(diag, x0, s), t);
        EXPECT_LE((direct - composed).norm(), 1e-9 * (1.0 + direct.norm()));
    }
}

TEST(Rk4, ZeroMatrixIsConstant) {
    const auto traj = rk4_flow(Matrix::Zero(2, 2), vec({1, 2}), 1.0, 0.1);
    for (const auto& x : traj.states) EXPECT_EQ(x, vec({1, 2}));
    EXPECT_EQ(traj.times.front(), 0.0);
    EXPECT_EQ(traj.times.back(), 1.0);
    EXPECT_EQ(traj.states.size(), 11u);
}

TEST(Rk4, ScalarDecay) {
    const Matrix A = Matrix::Constant(1, 1, -1.0);
    const auto traj = rk4_flow(A, vec({1.0}), 1.0, 0.1);
    EXPECT_LT(std::abs(traj.final_state()(0) - std::exp(-1.0)), 1e-6);
}

TEST(Rk4, StepGridAndWarnings) {
    const Matrix A = Matrix::Constant(1, 1, -1.0);
    const auto traj = rk4_flow(A, vec({1.0}), 1.0, 0.3);
    ASSERT_EQ(traj.times.size(), 5u);
    EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
    EXPECT_TRUE(traj.warnings.empty());
    for (std::size_t k = 1; k < traj.times.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);

    const auto stiff = rk4_flow(Matrix::Constant(1, 1, -30.0), vec({1.0}), 0.1, 0.05);
    EXPECT_FALSE(stiff.warnings.empty());
    EXPECT_THROW((void)rk4_flow(A, vec({1.0}), 1.0, 0.0), Error);
}

TEST(Rk4, BlowUpIsNonFinite) {
    try {
        (void)rk4_flow(Matrix::Constant(1, 1, -1e200), vec({1.0}), 1.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

double rk4_error(const Example2& ex, double h) {
    return (rk4_flow(ex.A, ex.x0, 1.0, h).final_state() - exact_flow(ex.diag, ex.x0, 1.0)).norm();
}

double mm_error(const Example2& ex, double tau) {
    return (minimizing_movement_flow(ex.gs, ex.ctx, ex.x0, 1.0, tau).final_state() - exact_flow(ex.diag, ex.x0, 1.0))
        .norm();
}

TEST(Rk4, FourthOrderOnNonReversibleChain) {
    const Example2 ex;
    const double ratio = rk4_error(ex, 0.05) / rk4_error(ex, 0.025);
    EXPECT_GE(ratio, 11.0);
    EXPECT_LE(ratio, 21.0);
}

TEST(Rk4Property, OrderOnRandomSystems) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index d = 2 + trial % 6;
        const auto diag = Diagonalisation::from(random_V(d, 10.0, rng), random_f(d, -2.0, 1.0, rng));
        const Matrix A = diag.reconstruct();
        const Vector x0 = Vector::Ones(d);
        const Vector exact = exact_flow(diag, x0, 1.0);
        const double h = 0.05 / std::max(1.0, operator_norm(A));
        const double e1 = (rk4_flow(A, x0, 1.0, h).final_state() - exact).norm();
        const double e2 = (rk4_flow(A, x0, 1.0, h / 2).final_state() - exact).norm();
        const double order = std::log2(e1 / e2);
        EXPECT_GE(order, 3.5) << trial;
        EXPECT_LE(order, 4.5) << trial;
    }
}

TEST(MinimizingMovement, NoDrivingForce) {
    const CanonicalGradientSystem gs{Matrix::Identity(2, 2), Matrix::Zero(2, 2), Vector::Zero(2)};
    const auto ctx = MetricContext::from(Diagonalisation::from(Matrix::Identity(2, 2), Vector::Zero(2)));
    const auto traj = minimizing_movement_flow(gs, ctx, vec({0.3, -0.7}), 1.0, 0.1);
    for (const auto& x : traj.states) EXPECT_TRUE(x.isApprox(vec({0.3, -0.7}), 1e-15));
}

TEST(MinimizingMovement, IdentityResolvent) {
    const CanonicalGradientSystem gs{Matrix::Identity(1, 1), Matrix::Identity(1, 1), Vector::Zero(1)};
    const auto ctx = MetricContext::from(Diagonalisation::from(Matrix::Identity(1, 1), vec({-1})));
    const double tau = 0.1;
    const auto traj = minimizing_movement_flow(gs, ctx, vec({1.0}), 0.5, tau);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        EXPECT_NEAR(traj.states[k](0), std::pow(1.0 / (1.0 + tau), static_cast<double>(k)), 1e-14);
    }
}

TEST(MinimizingMovement, FirstOrderOnNonReversibleChain) {
    const Example2 ex;
    const double ratio = mm_error(ex, 0.01) / mm_error(ex, 0.005);
    EXPECT_GE(ratio, 1.8);
    EXPECT_LE(ratio, 2.2);
}

TEST(MinimizingMovement, OneStepVariationalInequality) {
    const Example2 ex;
    const double tau = 0.05;
    const auto traj = minimizing_movement_flow(ex.gs, ex.ctx, ex.x0, 2.0, tau);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const double lhs = ex.gs.energy(traj.states[k]) +
                           std::pow(metric_distance(ex.ctx, traj.states[k], traj.states[k - 1]), 2) / (2 * tau);
        EXPECT_LE(lhs, ex.gs.energy(traj.states[k - 1]) + 1e-15);
    }
}

TEST(MinimizingMovement, SingularStepBeyondThreshold) {
    // f = (1, -1): B has G-metric eigenvalue -1, so tau >= 1 leaves G + tau B indefinite.
    const auto diag = Diagonalisation::from(Matrix::Identity(2, 2), vec({1, -1}));
    const auto gs = synthesize_canonical(diag);
    const auto ctx = MetricContext::from(diag);
    EXPECT_NO_THROW((void)minimizing_movement_flow(gs, ctx, vec({1, 1}), 1.0, 0.5));
    try {
        (void)minimizing_movement_flow(gs, ctx, vec({1, 1}), 10.0, 5.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularStep);
    }
}

TEST(Integrators, EquilibriumIsFixed) {
    const Example2 ex;
    // kernel of the generator: the stationary direction, f = 0
    const Vector x_eq = ex.diag.V_inv.col(2);
    ASSERT_LE((ex.A * x_eq).norm(), 1e-12);
    EXPECT_LE((exact_flow(ex.diag, x_eq, 3.0) - x_eq).norm(), 1e-12);
    EXPECT_LE((rk4_flow(ex.A, x_eq, 3.0, 0.01).final_state() - x_eq).norm(), 1e-12);
    EXPECT_LE((minimizing_movement_flow(ex.gs, ex.ctx, x_eq, 3.0, 0.01).final_state() - x_eq).norm(), 1e-12);
}

TEST(DissipationAudit, EquilibriumIsFlat) {
    const Example2 ex;
    const Vector x_eq = ex.diag.V_inv.col(2);
    const auto rep = dissipation_audit(ex.gs, exact_trajectory(ex.diag, x_eq, 1.0));
    EXPECT_TRUE(rep.monotone);
    EXPECT_LE(rep.dissipation_defect, 1e-12);
    EXPECT_EQ(rep.F_values.size(), 200u);
}

TEST(DissipationAudit, NonReversibleChainDecays) {
    const Example2 ex;
    for (int k = 0; k < 10; ++k) {
        const Vector x0 = SampleStream(3, static_cast<std::uint64_t>(k)).in_ball(3);
        const auto rep = dissipation_audit(ex.gs, exact_trajectory(ex.diag, x0, 2.0));
        EXPECT_TRUE(rep.monotone);
        // central differences on 200 nodes: O(dt^2) with dt = 0.01
        EXPECT_LE(rep.dissipation_defect, 1e-2 * std::max(rep.scale, 1e-12) * 36);
    }
}

TEST(DissipationAudit, ExpansiveModeStillDissipates) {
    // f = 1, V = 1: F(x) = -x^2/2, x(t) = e^t x0, F decreasing
    const auto diag = Diagonalisation::from(Matrix::Identity(1, 1), vec({1.0}));
    const auto gs = synthesize_canonical(diag);
    const auto rep = dissipation_audit(gs, exact_trajectory(diag, vec({0.5}), 1.0));
    EXPECT_TRUE(rep.monotone);
    EXPECT_LT(rep.F_values.back(), rep.F_values.front());
    EXPECT_NEAR(rep.F_values.back(), -0.5 * std::pow(0.5 * std::exp(1.0), 2), 1e-14);
}

}  // namespace
