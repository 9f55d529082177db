#include "gradflow/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace gradflow {

double CanonicalGradientSystem::energy(const Vector& x) const {
    const Vector dx = x - pi;
    return 0.5 * dx.dot(B * dx);
}

Vector CanonicalGradientSystem::gradient(const Vector& x) const { return B * (x - pi); }

CanonicalGradientSystem synthesize_canonical(const Diagonalisation& diag, double tol) {
    require_square_finite(diag.V, "V");
    require_size(diag.f, diag.V.rows(), "f");

    CanonicalGradientSystem gs;
    gs.K = symmetrized(diag.V_inv * diag.V_inv.transpose());
    gs.B = symmetrized(-diag.V.transpose() * diag.f.asDiagonal() * diag.V);
    gs.pi = Vector::Zero(diag.dim());
    if (!is_spd(gs.K, tol)) {
        throw Error(ErrorKind::IllConditioned,
                    "K = V^{-1} V^{-T} is not positive definite at working precision (cond(V) = " +
                        std::to_string(condition_number(diag.V)) + ")");
    }
    return gs;
}

Diagonalisation recover_diagonalisation(const CanonicalGradientSystem& gs, const Matrix& A, double tol) {
    require_square_finite(A, "A");
    require_square_finite(gs.K, "K");
    require_square_finite(gs.B, "B");
    if (gs.K.rows() != A.rows() || gs.B.rows() != A.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "system and A differ in dimension");
    }

    const double norm_A = A.norm();
    const double mismatch = (A + gs.K * gs.B).norm();
    if (mismatch > tol * norm_A) {
        throw Error(ErrorKind::FlowMismatch, "A != -K B, ||A + K B||_F = " + std::to_string(mismatch));
    }

    const Matrix S = symmetric_sqrt(gs.K, tol);
    const auto S_lu = S.partialPivLu();
    const Matrix A_bar = S_lu.solve(A * S);
    if ((A_bar - A_bar.transpose()).norm() > tol * std::max(A_bar.norm(), norm_A)) {
        throw Error(ErrorKind::AsymmetryDefect, "sqrt(K)^{-1} A sqrt(K) is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(A_bar));
    Diagonalisation out;
    out.f = es.eigenvalues();
    const Matrix& Q = es.eigenvectors();
    out.V = S_lu.solve(Q).transpose();  // Q^T S^{-1}, S symmetric
    out.V_inv = S * Q;
    out.residual = (A - out.reconstruct()).norm();
    if (out.residual > tol * norm_A) {
        throw Error(ErrorKind::IllConditioned,
                    "recovered diagonalisation misses A by " + std::to_string(out.residual));
    }
    return out;
}

double default_fd_step(const Vector& pi) { return 1e-5 * (1.0 + pi.norm()); }

void validate_probe(const GeneralisedSystemProbe& probe, double tol) {
    if (probe.dim <= 0) throw Error(ErrorKind::InvalidArgument, "probe dimension must be positive");
    require_size(probe.pi, probe.dim, "probe.pi");
    if (!probe.grad_F || !probe.psi_star_grad) {
        throw Error(ErrorKind::InvalidArgument, "probe needs grad_F and psi_star_grad");
    }

    const double g = probe.grad_F(probe.pi).norm();
    if (!(g <= tol)) {
        throw Error(ErrorKind::NotCritical, "||DF(pi)|| = " + std::to_string(g) + " exceeds " + std::to_string(tol));
    }

    const Vector zero = Vector::Zero(probe.dim);
    const double delta = 1e-3 * (1.0 + probe.pi.norm());
    for (Eigen::Index i = -1; i < probe.dim; ++i) {
        Vector x = probe.pi;
        if (i >= 0) x(i) += delta;
        const double r = probe.psi_star_grad(x, zero).norm();
        if (!(r <= tol)) {
            throw Error(ErrorKind::InvalidArgument, "D_xi Psi*(x, 0) = " + std::to_string(r) + " is not zero");
        }
    }
}

CanonicalGradientSystem linearise_generalised(const GeneralisedSystemProbe& probe, double h, double tol) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
    validate_probe(probe, tol);

    const Eigen::Index d = probe.dim;
    const Vector zero = Vector::Zero(d);

    Matrix K_hat(d, d);
    if (probe.psi_star_hess_at_pi0) {
        K_hat = *probe.psi_star_hess_at_pi0;
    } else {
        for (Eigen::Index j = 0; j < d; ++j) {
            const Vector e = h * Vector::Unit(d, j);
            K_hat.col(j) = (probe.psi_star_grad(probe.pi, e) - probe.psi_star_grad(probe.pi, -e)) / (2.0 * h);
        }
    }

    Matrix B_hat(d, d);
    if (probe.hess_F_at_pi) {
        B_hat = *probe.hess_F_at_pi;
    } else {
        for (Eigen::Index j = 0; j < d; ++j) {
            const Vector e = h * Vector::Unit(d, j);
            B_hat.col(j) = (probe.grad_F(probe.pi + e) - probe.grad_F(probe.pi - e)) / (2.0 * h);
        }
    }
    require_square_finite(K_hat, "D^2_xi Psi*(pi, 0)");
    require_square_finite(B_hat, "D^2 F(pi)");

    CanonicalGradientSystem gs{symmetrized(K_hat), symmetrized(B_hat), probe.pi};
    const Eigen::Index m = probe.conserved.cols();
    if (m == 0) {
        if (!is_spd(gs.K, kDefaultTol)) {
            throw Error(ErrorKind::NotSPD, "D^2_xi Psi*(pi, 0) is not positive definite; Psi* is not strictly convex");
        }
        return gs;
    }

    if (probe.conserved.rows() != d || m >= d) {
        throw Error(ErrorKind::DimensionMismatch, "conserved directions must be d x m with m < d");
    }
    const Eigen::HouseholderQR<Matrix> qr(probe.conserved);
    const Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix C = Q.leftCols(m);
    const Matrix complement = Q.rightCols(d - m);
    if ((gs.K * C).norm() > tol * std::max(gs.K.norm(), 1.0)) {
        throw Error(ErrorKind::NotSPD, "D^2_xi Psi*(pi, 0) does not annihilate the conserved directions");
    }
    if (!is_spd(complement.transpose() * gs.K * complement, kDefaultTol)) {
        throw Error(ErrorKind::NotSPD,
                    "D^2_xi Psi*(pi, 0) is not positive definite off the conserved directions");
    }
    return gs;
}

FlowResidualReport verify_flow_identity(const Matrix& A, const CanonicalGradientSystem& gs, double tol) {
    require_square_finite(A, "A");
    if (gs.K.rows() != A.rows() || gs.B.rows() != A.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "system and A differ in dimension");
    }
    const double norm_A = A.norm();
    const double defect = (A + gs.K * gs.B).norm();

    FlowResidualReport rep;
    rep.max_residual = norm_A > 0.0 ? defect / norm_A : defect;
    rep.num_samples = 0;
    rep.worst_point = Vector();
    rep.passed = rep.max_residual <= tol;
    return rep;
}

}  // namespace gradflow
