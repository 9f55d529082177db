#include "gradflow/sampling.hpp"

#include <cmath>

namespace gradflow {

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
}

double SampleStream::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

Vector SampleStream::in_ball(Eigen::Index dim, double radius) {
    std::normal_distribution<double> normal;
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(engine_);
    const double n = v.norm();
    if (n == 0.0) return Vector::Zero(dim);
    const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / static_cast<double>(dim));
    return v * (r / n);
}

Vector SampleStream::in_simplex(Eigen::Index dim, double floor) {
    std::exponential_distribution<double> expo(1.0);
    Vector y(dim);
    for (Eigen::Index i = 0; i < dim; ++i) y(i) = expo(engine_);
    y /= y.sum();
    const double mass = 1.0 - floor * static_cast<double>(dim);
    return Vector::Constant(dim, floor) + mass * y;
}

}  // namespace gradflow
