#pragma once

// Three integrators for x' = A x:
//   exact                e^{tA} x0 = V^{-1} diag(e^{t f}) V x0
//   rk4                  classical fixed-step Runge-Kutta
//   minimizing movement  x_{k+1} = argmin F(x) + d(x, x_k)^2 / (2 tau),
//                        i.e. (G + tau B) x_{k+1} = G x_k + tau B pi

#include "gradflow/geometry.hpp"

#include <string>
#include <vector>

namespace gradflow {

enum class FlowMethod { Exact, RK4, MinimizingMovement };

[[nodiscard]] constexpr std::string_view to_string(FlowMethod m) noexcept {
    switch (m) {
        case FlowMethod::Exact: return "exact";
        case FlowMethod::RK4: return "rk4";
        case FlowMethod::MinimizingMovement: return "mm";
    }
    return "unknown";
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    FlowMethod method = FlowMethod::Exact;
    std::vector<std::string> warnings;

    [[nodiscard]] const Vector& final_state() const { return states.back(); }
};

/// exp(t f_i) overflows past this exponent.
inline constexpr double kMaxExponent = 700.0;

/// Negative t runs the flow backwards. Throws Overflow when t f_i > 700.
[[nodiscard]] Vector exact_flow(const Diagonalisation& diag, const Vector& x0, double t);

/// Exact flow sampled on `nodes` uniform times over [0, t_end].
[[nodiscard]] Trajectory exact_trajectory(const Diagonalisation& diag, const Vector& x0, double t_end,
                                          int nodes = 200);

/// Fixed step h; the last step is shortened to land on t_end. Adds a warning
/// when h ||A|| > 1. Throws NonFinite if the state blows up.
[[nodiscard]] Trajectory rk4_flow(const Matrix& A, const Vector& x0, double t_end, double h);

/// Throws SingularStep when G + tau B is not positive definite, in which case
/// the step objective has no minimiser.
[[nodiscard]] Trajectory minimizing_movement_flow(const CanonicalGradientSystem& gs, const MetricContext& ctx,
                                                  const Vector& x0, double t_end, double tau);

struct DissipationReport {
    std::vector<double> F_values;
    bool monotone = true;
    /// max over interior nodes of |dF/dt + <DF, K DF>| with dF/dt by central
    /// differences.
    double dissipation_defect = 0.0;
    /// largest F increase between consecutive nodes (0 when monotone)
    double max_increase = 0.0;
    double scale = 0.0;
};

[[nodiscard]] DissipationReport dissipation_audit(const CanonicalGradientSystem& gs, const Trajectory& traj,
                                                  double rel_tol = 1e-9);

}  // namespace gradflow
