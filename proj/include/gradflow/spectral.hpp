#pragma once

// Dense spectral kernel: real diagonalisability, symmetric square roots,
// operator norms and SPD checks.
//
// The multiplication space is Omega = {1..d} with counting measure, so
// L^2(Omega) is R^d with the Euclidean inner product and every adjoint is a
// plain transpose. A real diagonalisation is the pair (V, f) with
//
//     A = V^{-1} diag(f) V,
//
// i.e. the columns of V^{-1} are eigenvectors of A and f holds the matching
// real eigenvalues.

#include "gradflow/types.hpp"

#include <complex>
#include <vector>

namespace gradflow {

enum class FailureKind { None, ComplexSpectrum, Defective };

[[nodiscard]] constexpr std::string_view to_string(FailureKind kind) noexcept {
    switch (kind) {
        case FailureKind::None: return "None";
        case FailureKind::ComplexSpectrum: return "ComplexSpectrum";
        case FailureKind::Defective: return "Defective";
    }
    return "Unknown";
}

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    bool real_diagonalisable = false;
    FailureKind failure_kind = FailureKind::None;
    /// cond(V) = cond(V^{-1}); infinity when the eigenvector matrix is singular.
    double condition_of_V = 0.0;
};

struct Diagonalisation {
    Matrix V;
    Matrix V_inv;  ///< eigenvector matrix, columns unit length
    Vector f;
    double residual = 0.0;  ///< ||A - V^{-1} diag(f) V||_F

    /// Builds a diagonalisation from an invertible V and real multipliers.
    /// The residual is zero since A is defined by the pair.
    static Diagonalisation from(const Matrix& V, const Vector& f);

    [[nodiscard]] Eigen::Index dim() const noexcept { return f.size(); }
    [[nodiscard]] Matrix reconstruct() const;
};

/// Raised by real_diagonalise when A has no real eigenbasis.
class NotDiagonalisable : public Error {
public:
    explicit NotDiagonalisable(SpectralReport report);
    [[nodiscard]] const SpectralReport& report() const noexcept { return report_; }

private:
    SpectralReport report_;
};

/// Full spectral analysis without throwing on a negative verdict.
[[nodiscard]] SpectralReport analyse_spectrum(const Matrix& A, double tol = kDefaultTol);

/// Eigenvalues ascend; equal eigenvalues are ordered by their eigenvectors
/// lexicographically. Eigenvectors are unit length with first nonzero entry
/// positive. Symmetric input yields orthogonal V.
///
/// Throws NotDiagonalisable (kind ComplexSpectrum or Defective).
[[nodiscard]] Diagonalisation real_diagonalise(const Matrix& A, double tol = kDefaultTol);

/// Unique SPD square root. Throws NotSPD when is_spd(K, tol) fails.
[[nodiscard]] Matrix symmetric_sqrt(const Matrix& K, double tol = kDefaultTol);

/// ||K - K^T||_F <= tol ||K||_F and lambda_min(sym K) > tol * |lambda|_max.
[[nodiscard]] bool is_spd(const Matrix& K, double tol = kDefaultTol);

/// Largest singular value.
[[nodiscard]] double operator_norm(const Matrix& M);

/// sigma_max / sigma_min; infinity for singular input.
[[nodiscard]] double condition_number(const Matrix& M);

}  // namespace gradflow
