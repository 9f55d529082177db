#include "gradflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace gradflow {
namespace {

// Grid 0 = t_0 < t_1 < ... < t_n = t_end with spacing h, last gap shortened.
std::vector<double> step_grid(double t_end, double h) {
    if (!(t_end >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be non-negative");
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
    std::vector<double> grid{0.0};
    if (t_end == 0.0) return grid;
    const auto n = static_cast<long>(std::ceil(t_end / h * (1.0 - 1e-12)));
    for (long k = 1; k < n; ++k) grid.push_back(static_cast<double>(k) * h);
    grid.push_back(t_end);
    return grid;
}

void require_finite_state(const Vector& x, double t) {
    if (!x.allFinite()) {
        throw Error(ErrorKind::NonFinite, "state became non-finite at t = " + std::to_string(t));
    }
}

}  // namespace

Vector exact_flow(const Diagonalisation& diag, const Vector& x0, double t) {
    require_size(x0, diag.dim(), "x0");
    if (t == 0.0) return x0;
    const Vector exponent = t * diag.f;
    if (exponent.maxCoeff() > kMaxExponent) {
        throw Error(ErrorKind::Overflow, "t * f exceeds " + std::to_string(kMaxExponent) + "; rescale time");
    }
    return diag.V_inv * (exponent.array().exp().matrix().asDiagonal() * (diag.V * x0));
}

Trajectory exact_trajectory(const Diagonalisation& diag, const Vector& x0, double t_end, int nodes) {
    if (!(t_end >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be non-negative");
    Trajectory traj;
    traj.method = FlowMethod::Exact;
    if (t_end == 0.0 || nodes < 2) {
        traj.times = {0.0};
        traj.states = {x0};
        return traj;
    }
    for (int k = 0; k < nodes; ++k) {
        const double t = k + 1 == nodes ? t_end : t_end * k / (nodes - 1);
        traj.times.push_back(t);
        traj.states.push_back(exact_flow(diag, x0, t));
    }
    return traj;
}

Trajectory rk4_flow(const Matrix& A, const Vector& x0, double t_end, double h) {
    require_square_finite(A, "A");
    require_size(x0, A.rows(), "x0");
    Trajectory traj;
    traj.method = FlowMethod::RK4;
    traj.times = step_grid(t_end, h);
    if (h * operator_norm(A) > 1.0) {
        traj.warnings.push_back("step h = " + std::to_string(h) +
                                " exceeds 1/||A||; RK4 may be inaccurate or unstable");
    }

    Vector x = x0;
    traj.states.push_back(x);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double dt = traj.times[k] - traj.times[k - 1];
        const Vector k1 = A * x;
        const Vector k2 = A * (x + 0.5 * dt * k1);
        const Vector k3 = A * (x + 0.5 * dt * k2);
        const Vector k4 = A * (x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        require_finite_state(x, traj.times[k]);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory minimizing_movement_flow(const CanonicalGradientSystem& gs, const MetricContext& ctx, const Vector& x0,
                                    double t_end, double tau) {
    require_size(x0, gs.dim(), "x0");
    if (ctx.dim() != gs.dim()) throw Error(ErrorKind::DimensionMismatch, "metric and system differ in dimension");

    Trajectory traj;
    traj.method = FlowMethod::MinimizingMovement;
    traj.times = step_grid(t_end, tau);

    const Vector B_pi = gs.B * gs.pi;
    Vector x = x0;
    traj.states.push_back(x);
    double solved_for = -1.0;
    Eigen::LLT<Matrix> llt;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double dt = traj.times[k] - traj.times[k - 1];
        if (dt != solved_for) {
            llt.compute(symmetrized(ctx.G + dt * gs.B));
            if (llt.info() != Eigen::Success) {
                throw Error(ErrorKind::SingularStep,
                            "G + tau B is not positive definite for tau = " + std::to_string(dt));
            }
            solved_for = dt;
        }
        x = llt.solve(ctx.G * x + dt * B_pi);
        require_finite_state(x, traj.times[k]);
        traj.states.push_back(x);
    }
    return traj;
}

DissipationReport dissipation_audit(const CanonicalGradientSystem& gs, const Trajectory& traj, double rel_tol) {
    DissipationReport rep;
    // 1/2 ||B|| |x - pi|^2 bounds both F and its rounding error
    const double norm_B = operator_norm(gs.B);
    for (const auto& x : traj.states) {
        rep.F_values.push_back(gs.energy(x));
        rep.scale = std::max({rep.scale, std::abs(rep.F_values.back()), 0.5 * norm_B * (x - gs.pi).squaredNorm()});
    }
    const auto& F = rep.F_values;
    for (std::size_t k = 1; k < F.size(); ++k) rep.max_increase = std::max(rep.max_increase, F[k] - F[k - 1]);
    rep.monotone = rep.max_increase <= rel_tol * rep.scale;

    for (std::size_t k = 1; k + 1 < F.size(); ++k) {
        const double rate = (F[k + 1] - F[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        const Vector g = gs.gradient(traj.states[k]);
        rep.dissipation_defect = std::max(rep.dissipation_defect, std::abs(rate + g.dot(gs.K * g)));
    }
    return rep;
}

}  // namespace gradflow
