#include "gradflow/markov.hpp"

#include "gradflow/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace gradflow::markov {
namespace {

double entry_scale(const Matrix& A) {
    const double s = A.cwiseAbs().maxCoeff();
    return s > 0.0 ? s : 1.0;
}

}  // namespace

GeneratorMatrix GeneratorMatrix::validate(const Matrix& A, double tol) {
    require_square_finite(A, "generator");
    const double scale = entry_scale(A);
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (i != j && A(i, j) < -tol * scale) {
                throw Error(ErrorKind::NegativeRate, "rate A(" + std::to_string(i) + ", " + std::to_string(j) +
                                                         ") = " + std::to_string(A(i, j)) + " is negative");
            }
        }
        const double col_sum = A.col(j).sum();
        if (std::abs(col_sum) > tol * scale) {
            throw Error(ErrorKind::ColumnSumNonzero,
                        "column " + std::to_string(j) + " sums to " + std::to_string(col_sum));
        }
    }
    return GeneratorMatrix(A);
}

Vector stationary_distribution(const GeneratorMatrix& G, double tol) {
    const Matrix& A = G.matrix();
    const Eigen::Index d = G.dim();
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv(0);
    const auto kernel_dim = std::count_if(sv.begin(), sv.end(), [&](double s) { return s <= tol * smax; });
    if (kernel_dim != 1) {
        throw Error(ErrorKind::DegenerateKernel, "generator kernel has dimension " + std::to_string(kernel_dim));
    }

    Vector v = svd.matrixV().col(d - 1);
    if (v.sum() < 0.0) v = -v;
    const double floor = tol * v.cwiseAbs().maxCoeff();
    if ((v.array() <= floor).any()) {
        throw Error(ErrorKind::NonPositive, "kernel vector is not strictly positive");
    }
    return v / v.sum();
}

bool is_reversible(const GeneratorMatrix& G, const Vector& pi, double tol) {
    const Matrix& A = G.matrix();
    require_size(pi, G.dim(), "pi");
    const Matrix flux = A * pi.asDiagonal();  // flux(i, j) = A(i, j) pi_j
    const double scale = entry_scale(flux);
    return (flux - flux.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double log_mean(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw Error(ErrorKind::NonPositiveInput, "logarithmic mean needs positive finite arguments");
    }
    const double ratio = a / b;
    const double log_gap = (ratio > 0.5 && ratio < 2.0) ? std::log1p((a - b) / b) : std::log(a) - std::log(b);
    if (std::abs(log_gap) < 1e-8) {
        const double mean = 0.5 * (a + b);
        const double delta = (a - b) / mean;
        return mean * (1.0 - delta * delta / 12.0);
    }
    return (a - b) / log_gap;
}

EntropicStructure make_entropic_structure(const GeneratorMatrix& G, double tol) {
    EntropicStructure es;
    es.pi = stationary_distribution(G, tol);
    if (!is_reversible(G, es.pi, tol)) {
        throw Error(ErrorKind::NotReversible, "chain violates detailed balance");
    }
    Matrix w = G.matrix() * es.pi.asDiagonal();
    w.diagonal().setZero();
    es.weights = symmetrized(w);
    return es;
}

Matrix entropic_onsager(const EntropicStructure& es, const Vector& x) {
    const Eigen::Index d = es.pi.size();
    require_size(x, d, "x");
    if ((x.array() <= 0.0).any()) throw Error(ErrorKind::NonPositiveState, "K(x) needs a strictly positive state");

    const Vector u = x.cwiseQuotient(es.pi);
    Matrix K = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double w = es.weights(i, j);
            if (w == 0.0) continue;
            const double c = w * log_mean(u(i), u(j));
            K(i, i) += c;
            K(j, j) += c;
            K(i, j) -= c;
            K(j, i) -= c;
        }
    }
    return K;
}

EntropyValue relative_entropy(const Vector& x, const Vector& pi) {
    require_size(x, pi.size(), "x");
    if ((x.array() <= 0.0).any() || (pi.array() <= 0.0).any()) {
        throw Error(ErrorKind::NonPositiveInput, "relative entropy needs strictly positive x and pi");
    }
    const Eigen::ArrayXd log_ratio = (x.array() / pi.array()).log();
    return {(x.array() * log_ratio).sum(), (log_ratio + 1.0).matrix()};
}

FlowResidualReport verify_entropic_flow(const GeneratorMatrix& G, const EntropicStructure& es, int samples,
                                        std::uint64_t seed, double tol) {
    if (!is_reversible(G, es.pi, tol)) throw Error(ErrorKind::NotReversible, "chain violates detailed balance");

    const Matrix& A = G.matrix();
    const Eigen::Index d = G.dim();
    const double norm_A = A.norm();

    FlowResidualReport rep;
    rep.num_samples = samples;
    for (int k = 0; k < samples; ++k) {
        SampleStream rng(seed, static_cast<std::uint64_t>(k));
        const Vector x = rng.in_simplex(d);
        const Vector Ax = A * x;
        const Vector KDF = entropic_onsager(es, x) * relative_entropy(x, es.pi).gradient;
        const double floor = 1e-8 * norm_A * x.norm();
        const double r = (Ax + KDF).norm() / std::max(Ax.norm(), floor);
        if (r > rep.max_residual || rep.worst_point.size() == 0) {
            rep.max_residual = std::max(rep.max_residual, r);
            rep.worst_point = x;
        }
    }
    rep.passed = rep.max_residual <= tol;
    return rep;
}

GeneralisedSystemProbe entropic_probe(const EntropicStructure& es) {
    GeneralisedSystemProbe probe;
    probe.dim = es.pi.size();
    probe.pi = es.pi;
    probe.grad_F = [pi = es.pi](const Vector& x) -> Vector {
        if ((x.array() <= 0.0).any()) throw Error(ErrorKind::NonPositiveState, "entropy gradient needs x > 0");
        return (x.array() / pi.array()).log().matrix();
    };
    probe.psi_star_grad = [es](const Vector& x, const Vector& xi) -> Vector { return entropic_onsager(es, x) * xi; };
    probe.conserved = Vector::Ones(es.pi.size());
    return probe;
}

}  // namespace gradflow::markov
