#pragma once

// Flat metric induced by a constant Onsager operator K = V^{-1} V^{-T}:
// G = K^{-1} = V^T V, geodesics are straight lines and
//
//     d(x1, x2) = ||V (x2 - x1)||.
//
// The convexity constants follow the two-step argument: F is lambda~-convex
// in the Euclidean space, and the metric bounds
//     ||x2 - x1|| / ||V^{-1}|| <= d(x1, x2) <= ||V|| ||x2 - x1||
// transfer that to geodesic lambda-convexity in (R^d, d).

#include "gradflow/synthesis.hpp"

#include <cstdint>
#include <vector>

namespace gradflow {

struct MetricContext {
    Matrix V;
    Matrix G;  ///< V^T V
    double norm_V = 0.0;
    double norm_Vinv = 0.0;

    static MetricContext from(const Diagonalisation& diag);
    [[nodiscard]] Eigen::Index dim() const noexcept { return V.rows(); }
};

struct ConvexityConstants {
    double lambda_tilde = 0.0;
    double lambda = 0.0;
    /// lambda obtained from lambda_tilde through the metric-bounds transfer.
    double lambda_transfer = 0.0;
    double c_V = 0.0;
    double c_V_tilde = 0.0;
    double esssup_f = 0.0;
};

/// Result of a sampled inequality check. The inequality holds on the samples
/// when max_violation <= rel_tol * scale.
struct CheckReport {
    double max_violation = 0.0;
    double scale = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] bool passed(double rel_tol) const noexcept { return max_violation <= rel_tol * scale; }
};

struct SamplingOptions {
    int samples = 1000;
    std::uint64_t seed = 0;
    double radius = 1.0;
};

[[nodiscard]] double metric_distance(const MetricContext& ctx, const Vector& x1, const Vector& x2);

[[nodiscard]] ConvexityConstants convexity_constants(const Diagonalisation& diag);

/// {0, 0.1, ..., 1} plus 0.5 -/+ 1e-3.
[[nodiscard]] std::vector<double> default_theta_grid();

/// max(0, lambda~ |x1 - x2|^2 - <DF(x1) - DF(x2), x1 - x2>) over sampled pairs.
[[nodiscard]] CheckReport check_strong_monotonicity(const CanonicalGradientSystem& gs, double lambda_tilde,
                                                    const SamplingOptions& opts = {});

/// Positive defect of
///   F(g(t)) <= (1-t) F(x1) + t F(x2) - lambda t(1-t)/2 d(x1, x2)^2
/// along straight segments g, maximised over sampled pairs and theta.
[[nodiscard]] CheckReport check_geodesic_convexity(const CanonicalGradientSystem& gs, const MetricContext& ctx,
                                                   double lambda, const std::vector<double>& theta_grid,
                                                   const SamplingOptions& opts = {});

/// Positive defect of d(x1(t), x2(t)) <= exp(-lambda t) d(x1(0), x2(0)) under
/// the exact flow.
[[nodiscard]] CheckReport check_contraction(const Diagonalisation& diag, const MetricContext& ctx, double lambda,
                                            const std::vector<double>& times, const SamplingOptions& opts = {});

/// max f <= spectrum_bound + tol. With bound 0 this is the statement that a
/// spectrum in (-inf, 0] forces f <= 0.
[[nodiscard]] bool essential_range_check(const Diagonalisation& diag, double spectrum_bound,
                                         double tol = kDefaultTol);

}  // namespace gradflow
