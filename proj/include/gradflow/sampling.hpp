#pragma once

// Seeded sample generators shared by the certification checks. Sample k of a
// run depends only on (seed, k), never on how the loop is scheduled.

#include "gradflow/types.hpp"

#include <cstdint>
#include <random>

namespace gradflow {

class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t index);

    /// Uniform point in the Euclidean ball of the given radius.
    Vector in_ball(Eigen::Index dim, double radius = 1.0);

    /// Point of the probability simplex with every coordinate >= floor.
    Vector in_simplex(Eigen::Index dim, double floor = 1e-3);

    double uniform(double lo, double hi);

private:
    std::mt19937_64 engine_;
};

}  // namespace gradflow
