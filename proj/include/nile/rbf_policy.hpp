#pragma once

// Gaussian radial-basis release policy. Each action component is a convex
// combination of kernels
//   phi_i(x) = exp(-sum_j ((x_j - c_ij) / b_ij)^2)
// so every output lies in [0, 1] without clamping.

#include <cstddef>
#include <span>
#include <vector>

#include "nile/env.hpp"

namespace nile {

inline constexpr double kMinRadius = 1e-3;

/// Flat parameter vector: for each kernel its 5 centers then its 5 radii,
/// followed by the 4 x n_rbf weight matrix (row per action component).
using Genome = std::vector<double>;

struct RbfPolicy {
    std::size_t n_rbf = 0;
    std::vector<double> centers;  // n_rbf x kObservationDim, in [0, 1]
    std::vector<double> radii;    // n_rbf x kObservationDim, in (0, 1]
    std::vector<double> weights;  // kNumDams x n_rbf, rows on the simplex

    /// Throws UsageError on inconsistent sizes, non-positive radii or weight
    /// rows off the simplex.
    void validate() const;

    double center(std::size_t i, std::size_t j) const { return centers[i * kObservationDim + j]; }
    double radius(std::size_t i, std::size_t j) const { return radii[i * kObservationDim + j]; }
    double weight(std::size_t k, std::size_t i) const { return weights[k * n_rbf + i]; }
};

constexpr std::size_t genome_length(std::size_t n_rbf) {
    return n_rbf * (2 * kObservationDim) + kNumDams * n_rbf;
}

Action policy_act(const RbfPolicy& policy, std::span<const double> obs);

/// Maps raw genes to a valid policy: centers clamped to [0, 1], radii to
/// [1e-3, 1], weights clamped at 0 and each row normalized (uniform when the
/// row sums to 0).
RbfPolicy decode_genome(std::span<const double> genome, std::size_t n_rbf);

Genome encode_policy(const RbfPolicy& policy);

}  // namespace nile
