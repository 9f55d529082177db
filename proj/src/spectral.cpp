#include "gradflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gradflow {
namespace {

// Unit eigenvector columns, sign fixed so the first entry above this
// magnitude is positive.
constexpr double kSignThreshold = 1e-10;

struct EigenBasis {
    Vector f;
    Matrix W;  // columns are eigenvectors
    SpectralReport report;
};

void normalise_columns(Matrix& W) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        auto col = W.col(j);
        const double n = col.norm();
        if (n > 0.0) col /= n;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col(i)) > kSignThreshold) {
                if (col(i) < 0.0) col = -col;
                break;
            }
        }
    }
}

// Ascending by eigenvalue; eigenvalues within `tie` of their predecessor form
// a cluster that is ordered by eigenvector components.
void sort_basis(Vector& f, Matrix& W, double tie) {
    const Eigen::Index d = f.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return f(a) < f(b); });

    auto lex_less = [&](Eigen::Index a, Eigen::Index b) {
        const auto ca = W.col(a);
        const auto cb = W.col(b);
        return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
    };
    auto begin = order.begin();
    while (begin != order.end()) {
        auto end = std::next(begin);
        while (end != order.end() && f(*end) - f(*std::prev(end)) <= tie) ++end;
        std::sort(begin, end, lex_less);
        begin = end;
    }

    Vector f_sorted(d);
    Matrix W_sorted(W.rows(), d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        f_sorted(k) = f(src);
        W_sorted.col(k) = W.col(src);
    }
    f = std::move(f_sorted);
    W = std::move(W_sorted);
}

EigenBasis compute_basis(const Matrix& A, double tol) {
    require_square_finite(A, "A");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");

    const double norm_A = A.norm();
    EigenBasis out;
    SpectralReport& rep = out.report;

    if ((A - A.transpose()).norm() <= tol * norm_A) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(A));
        out.f = es.eigenvalues();
        out.W = es.eigenvectors();
        for (Eigen::Index i = 0; i < out.f.size(); ++i) rep.eigenvalues.emplace_back(out.f(i), 0.0);
    } else {
        Eigen::EigenSolver<Matrix> es(A);
        const auto& values = es.eigenvalues();
        for (Eigen::Index i = 0; i < values.size(); ++i) rep.eigenvalues.push_back(values(i));
        const bool complex = std::any_of(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                                         [&](const auto& z) { return std::abs(z.imag()) > tol * norm_A; });
        if (complex) {
            rep.real_diagonalisable = false;
            rep.failure_kind = FailureKind::ComplexSpectrum;
            rep.condition_of_V = std::numeric_limits<double>::infinity();
            return out;
        }
        out.f = values.real();
        out.W = es.eigenvectors().real();
    }

    normalise_columns(out.W);
    sort_basis(out.f, out.W, tol * std::max(norm_A, std::numeric_limits<double>::min()));

    Eigen::JacobiSVD<Matrix> svd(out.W);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    rep.condition_of_V = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin > tol * smax)) {
        rep.real_diagonalisable = false;
        rep.failure_kind = FailureKind::Defective;
        return out;
    }
    rep.real_diagonalisable = true;
    rep.failure_kind = FailureKind::None;

    rep.eigenvalues.clear();
    for (Eigen::Index i = 0; i < out.f.size(); ++i) rep.eigenvalues.emplace_back(out.f(i), 0.0);
    return out;
}

std::string describe(const SpectralReport& r) {
    std::string msg = "matrix is not real diagonalisable (" + std::string(to_string(r.failure_kind)) + ")";
    if (r.failure_kind == FailureKind::Defective) {
        msg += ", eigenvector condition " + std::to_string(r.condition_of_V);
    }
    return msg;
}

}  // namespace

Diagonalisation Diagonalisation::from(const Matrix& V, const Vector& f) {
    require_square_finite(V, "V");
    require_size(f, V.rows(), "f");
    Eigen::FullPivLU<Matrix> lu(V);
    if (!lu.isInvertible()) throw Error(ErrorKind::IllConditioned, "V is singular");
    return Diagonalisation{V, lu.inverse(), f, 0.0};
}

Matrix Diagonalisation::reconstruct() const { return V_inv * f.asDiagonal() * V; }

NotDiagonalisable::NotDiagonalisable(SpectralReport report)
    : Error(report.failure_kind == FailureKind::ComplexSpectrum ? ErrorKind::ComplexSpectrum
                                                                : ErrorKind::Defective,
            describe(report)),
      report_(std::move(report)) {}

SpectralReport analyse_spectrum(const Matrix& A, double tol) {
    auto basis = compute_basis(A, tol);
    if (basis.report.real_diagonalisable) {
        // Residual certification can still demote a numerically fragile basis.
        try {
            (void)real_diagonalise(A, tol);
        } catch (const NotDiagonalisable& e) {
            return e.report();
        }
    }
    return basis.report;
}

Diagonalisation real_diagonalise(const Matrix& A, double tol) {
    auto basis = compute_basis(A, tol);
    if (!basis.report.real_diagonalisable) throw NotDiagonalisable(std::move(basis.report));

    Diagonalisation out;
    out.V_inv = std::move(basis.W);
    out.V = out.V_inv.partialPivLu().inverse();
    out.f = std::move(basis.f);
    out.residual = (A - out.reconstruct()).norm();
    if (out.residual > tol * A.norm()) {
        basis.report.real_diagonalisable = false;
        basis.report.failure_kind = FailureKind::Defective;
        throw NotDiagonalisable(std::move(basis.report));
    }
    return out;
}

bool is_spd(const Matrix& K, double tol) {
    require_square_finite(K, "K");
    const double norm_K = K.norm();
    if (norm_K == 0.0) return false;
    if ((K - K.transpose()).norm() > tol * norm_K) return false;
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrized(K), Eigen::EigenvaluesOnly).eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    return ev(0) > tol * largest;
}

Matrix symmetric_sqrt(const Matrix& K, double tol) {
    if (!is_spd(K, tol)) throw Error(ErrorKind::NotSPD, "square root requires a symmetric positive definite matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(K));
    return symmetrized(es.operatorSqrt());
}

double operator_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

double condition_number(const Matrix& M) {
    const Vector sv = Eigen::JacobiSVD<Matrix>(M).singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace gradflow
