#include "gradflow/geometry.hpp"

#include "gradflow/flow.hpp"
#include "gradflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradflow {

MetricContext MetricContext::from(const Diagonalisation& diag) {
    MetricContext ctx;
    ctx.V = diag.V;
    ctx.G = symmetrized(diag.V.transpose() * diag.V);
    ctx.norm_V = operator_norm(diag.V);
    ctx.norm_Vinv = operator_norm(diag.V_inv);
    return ctx;
}

double metric_distance(const MetricContext& ctx, const Vector& x1, const Vector& x2) {
    require_size(x1, ctx.dim(), "x1");
    require_size(x2, ctx.dim(), "x2");
    return (ctx.V * (x2 - x1)).norm();
}

ConvexityConstants convexity_constants(const Diagonalisation& diag) {
    const double nV = operator_norm(diag.V);
    const double nVi = operator_norm(diag.V_inv);

    ConvexityConstants c;
    c.esssup_f = diag.f.maxCoeff();
    if (c.esssup_f >= 0.0) {
        c.c_V = nVi * nVi * nV * nV;
        c.c_V_tilde = nV * nV;
    } else {
        c.c_V = 1.0 / (nVi * nVi * nV * nV);
        c.c_V_tilde = 1.0 / (nVi * nVi);
    }
    // + 0.0 folds -0 into +0 when esssup f = 0
    c.lambda_tilde = -c.esssup_f * c.c_V_tilde + 0.0;
    c.lambda = -c.esssup_f * c.c_V + 0.0;
    c.lambda_transfer = c.lambda_tilde > 0.0 ? c.lambda_tilde / (nV * nV) : c.lambda_tilde * nVi * nVi + 0.0;

    const double gap = std::abs(c.lambda - c.lambda_transfer);
    if (gap > 1e-12 * std::max(std::abs(c.lambda), 1e-300)) {
        throw std::logic_error("geodesic convexity constant disagrees with the transferred flat constant");
    }
    return c;
}

std::vector<double> default_theta_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(0.1 * k);
    grid.push_back(0.5 - 1e-3);
    grid.push_back(0.5 + 1e-3);
    return grid;
}

CheckReport check_strong_monotonicity(const CanonicalGradientSystem& gs, double lambda_tilde,
                                      const SamplingOptions& opts) {
    CheckReport rep{0.0, 0.0, opts.samples, opts.seed};
    const Eigen::Index d = gs.dim();
    for (int k = 0; k < opts.samples; ++k) {
        SampleStream rng(opts.seed, static_cast<std::uint64_t>(k));
        const Vector x1 = rng.in_ball(d, opts.radius);
        const Vector x2 = rng.in_ball(d, opts.radius);
        const Vector dx = x1 - x2;
        const double lhs = (gs.gradient(x1) - gs.gradient(x2)).dot(dx);
        const double rhs = lambda_tilde * dx.squaredNorm();
        rep.max_violation = std::max(rep.max_violation, rhs - lhs);
        rep.scale = std::max({rep.scale, std::abs(lhs), std::abs(rhs)});
    }
    return rep;
}

CheckReport check_geodesic_convexity(const CanonicalGradientSystem& gs, const MetricContext& ctx, double lambda,
                                     const std::vector<double>& theta_grid, const SamplingOptions& opts) {
    CheckReport rep{0.0, 0.0, opts.samples, opts.seed};
    const Eigen::Index d = gs.dim();
    for (int k = 0; k < opts.samples; ++k) {
        SampleStream rng(opts.seed, static_cast<std::uint64_t>(k));
        const Vector x1 = rng.in_ball(d, opts.radius);
        const Vector x2 = rng.in_ball(d, opts.radius);
        const double F1 = gs.energy(x1);
        const double F2 = gs.energy(x2);
        const double dist2 = std::pow(metric_distance(ctx, x1, x2), 2);
        for (double theta : theta_grid) {
            const double lhs = gs.energy((1.0 - theta) * x1 + theta * x2);
            const double penalty = lambda * theta * (1.0 - theta) / 2.0 * dist2;
            const double rhs = (1.0 - theta) * F1 + theta * F2 - penalty;
            rep.max_violation = std::max(rep.max_violation, lhs - rhs);
            rep.scale = std::max({rep.scale, std::abs(lhs), std::abs(F1), std::abs(F2), std::abs(penalty)});
        }
    }
    return rep;
}

CheckReport check_contraction(const Diagonalisation& diag, const MetricContext& ctx, double lambda,
                              const std::vector<double>& times, const SamplingOptions& opts) {
    CheckReport rep{0.0, 0.0, opts.samples, opts.seed};
    const Eigen::Index d = diag.dim();
    for (int k = 0; k < opts.samples; ++k) {
        SampleStream rng(opts.seed, static_cast<std::uint64_t>(k));
        const Vector x1 = rng.in_ball(d, opts.radius);
        const Vector x2 = rng.in_ball(d, opts.radius);
        const double d0 = metric_distance(ctx, x1, x2);
        for (double t : times) {
            const double dt = metric_distance(ctx, exact_flow(diag, x1, t), exact_flow(diag, x2, t));
            const double bound = std::exp(-lambda * t) * d0;
            rep.max_violation = std::max(rep.max_violation, dt - bound);
            rep.scale = std::max({rep.scale, dt, bound});
        }
    }
    return rep;
}

bool essential_range_check(const Diagonalisation& diag, double spectrum_bound, double tol) {
    return diag.f.maxCoeff() <= spectrum_bound + tol;
}

}  // namespace gradflow
