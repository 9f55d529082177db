#pragma once

// Finite-state Markov chains in the transposed convention: probability
// vectors evolve by x' = A x, so A(i, j) >= 0 is the jump rate j -> i and
// every column of A sums to zero.
//
// A reversible chain with stationary distribution pi is the flow of the
// relative entropy F(x) = sum_i x_i log(x_i / pi_i) under the state-dependent
// Onsager operator
//
//     K(x) = sum_{i<j} w_ij Lambda(x_i/pi_i, x_j/pi_j) (e_i - e_j)(e_i - e_j)^T,
//
// with edge conductances w_ij = A(i, j) pi_j = A(j, i) pi_i and the
// logarithmic mean Lambda.

#include "gradflow/synthesis.hpp"

#include <cstdint>

namespace gradflow::markov {

class GeneratorMatrix {
public:
    /// Throws NegativeRate or ColumnSumNonzero.
    static GeneratorMatrix validate(const Matrix& A, double tol = kDefaultTol);

    [[nodiscard]] const Matrix& matrix() const noexcept { return A_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return A_.rows(); }

private:
    explicit GeneratorMatrix(Matrix A) : A_(std::move(A)) {}
    Matrix A_;
};

struct EntropicStructure {
    Vector pi;
    Matrix weights;  ///< symmetric, zero diagonal
};

struct EntropyValue {
    double value = 0.0;
    Vector gradient;
};

[[nodiscard]] inline GeneratorMatrix validate_generator(const Matrix& A, double tol = kDefaultTol) {
    return GeneratorMatrix::validate(A, tol);
}

/// Unique pi with A pi = 0, pi > 0, sum pi = 1. Throws DegenerateKernel or
/// NonPositive.
[[nodiscard]] Vector stationary_distribution(const GeneratorMatrix& G, double tol = kDefaultTol);

/// Detailed balance A(i, j) pi_j = A(j, i) pi_i.
[[nodiscard]] bool is_reversible(const GeneratorMatrix& G, const Vector& pi, double tol = kDefaultTol);

/// Lambda(a, b) = (a - b) / (log a - log b), Lambda(a, a) = a.
[[nodiscard]] double log_mean(double a, double b);

/// Stationary distribution plus conductances. Throws NotReversible.
[[nodiscard]] EntropicStructure make_entropic_structure(const GeneratorMatrix& G, double tol = kDefaultTol);

/// Throws NonPositiveState if some x_i <= 0.
[[nodiscard]] Matrix entropic_onsager(const EntropicStructure& es, const Vector& x);

/// sum x_i log(x_i / pi_i) and its gradient log(x_i / pi_i) + 1.
[[nodiscard]] EntropyValue relative_entropy(const Vector& x, const Vector& pi);

/// Samples interior simplex points and reports the largest
/// ||A x + K(x) DF(x)|| / ||A x||. Throws NotReversible.
[[nodiscard]] FlowResidualReport verify_entropic_flow(const GeneratorMatrix& G, const EntropicStructure& es,
                                                      int samples = 1000, std::uint64_t seed = 0,
                                                      double tol = kDefaultTol);

/// Generalised-system view of the entropic structure for linearisation:
/// Psi*(x, xi) = 1/2 <xi, K(x) xi>, and DF(x) = log(x / pi), the gradient of
/// sum x_i log(x_i / pi_i) - x_i + pi_i. The dropped constant 1 lies in the
/// kernel of every K(x), so the flow is unchanged and pi becomes critical.
/// Total mass is declared conserved, since K(pi) 1 = 0.
[[nodiscard]] GeneralisedSystemProbe entropic_probe(const EntropicStructure& es);

}  // namespace gradflow::markov
