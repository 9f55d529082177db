#pragma once

// Canonical gradient systems (K, B, pi) with constant Onsager operator K and
// quadratic free energy F(x) = 1/2 <B(x - pi), x - pi>; their flow is
// x' = -K DF(x) = -K B (x - pi).
//
// Forward construction from a real diagonalisation A = V^{-1} diag(f) V:
//     K = V^{-1} V^{-T},   B = -V^T diag(f) V,   pi = 0,
// so that -K B = V^{-1} diag(f) V = A.
//
// Converse: with S = sqrt(K), Abar = S^{-1} A S = -S B S is symmetric, and its
// orthogonal eigendecomposition Abar = Q diag(f) Q^T gives V = Q^T S^{-1}.

#include "gradflow/spectral.hpp"

#include <functional>
#include <optional>

namespace gradflow {

struct CanonicalGradientSystem {
    Matrix K;
    Matrix B;
    Vector pi;

    [[nodiscard]] Eigen::Index dim() const noexcept { return pi.size(); }
    [[nodiscard]] double energy(const Vector& x) const;
    [[nodiscard]] Vector gradient(const Vector& x) const;
    /// -K B, the generator of the flow.
    [[nodiscard]] Matrix generator() const { return -K * B; }
};

/// A generalised gradient system (Psi*, F) seen only through derivatives.
/// Callables must be reentrant.
struct GeneralisedSystemProbe {
    Eigen::Index dim = 0;
    Vector pi;
    std::function<Vector(const Vector&)> grad_F;
    std::optional<Matrix> hess_F_at_pi;
    /// D_xi Psi*(x, xi)
    std::function<Vector(const Vector&, const Vector&)> psi_star_grad;
    std::optional<Matrix> psi_star_hess_at_pi0;
    /// Columns c with D^2_xi Psi*(pi, 0) c = 0 by construction, e.g. total
    /// mass. Positive definiteness is then required on their orthogonal
    /// complement only. Empty by default.
    Matrix conserved;
};

struct FlowResidualReport {
    double max_residual = 0.0;
    int num_samples = 0;
    Vector worst_point;
    bool passed = false;
};

/// Throws IllConditioned when K loses positive definiteness at working precision.
[[nodiscard]] CanonicalGradientSystem synthesize_canonical(const Diagonalisation& diag,
                                                           double tol = kDefaultTol);

/// Throws FlowMismatch if A != -K B, AsymmetryDefect if S^{-1} A S is not
/// symmetric, NotSPD if K is not SPD.
[[nodiscard]] Diagonalisation recover_diagonalisation(const CanonicalGradientSystem& gs, const Matrix& A,
                                                      double tol = kDefaultTol);

/// Default central-difference step for a probe around pi.
[[nodiscard]] double default_fd_step(const Vector& pi);

/// Checks grad_F(pi) ~ 0 and psi_star_grad(x, 0) ~ 0 on a few sampled x.
/// Throws NotCritical or InvalidArgument.
void validate_probe(const GeneralisedSystemProbe& probe, double tol = 1e-8);

/// Linearises at the equilibrium: K = D^2_xi Psi*(pi, 0), B = D^2 F(pi).
/// Hessians not supplied by the probe are taken by central differences with
/// step h. Throws NotSPD when K is not positive definite.
[[nodiscard]] CanonicalGradientSystem linearise_generalised(const GeneralisedSystemProbe& probe, double h,
                                                            double tol = 1e-8);

/// ||A + K B||_F / ||A||_F (absolute when A = 0); passes iff <= tol.
[[nodiscard]] FlowResidualReport verify_flow_identity(const Matrix& A, const CanonicalGradientSystem& gs,
                                                      double tol = kDefaultTol);

}  // namespace gradflow
