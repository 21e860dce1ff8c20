#include "nile/rbf_policy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

void RbfPolicy::validate() const {
    if (n_rbf == 0) throw UsageError("rbf policy needs at least one kernel");
    if (centers.size() != n_rbf * kObservationDim || radii.size() != n_rbf * kObservationDim ||
        weights.size() != kNumDams * n_rbf) {
        throw UsageError(fmt::format("rbf policy parameter sizes inconsistent with n_rbf = {}", n_rbf));
    }
    for (double b : radii) {
        if (!(b > 0.0)) throw UsageError("rbf radii must be strictly positive");
    }
    for (std::size_t k = 0; k < kNumDams; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_rbf; ++i) {
            if (weight(k, i) < 0.0) throw UsageError("rbf weights must be non-negative");
            sum += weight(k, i);
        }
        if (std::abs(sum - 1.0) > 1e-9) throw UsageError("rbf weight rows must sum to 1");
    }
}

Action policy_act(const RbfPolicy& policy, std::span<const double> obs) {
    if (obs.size() != kObservationDim) {
        throw UsageError(fmt::format("policy_act: observation has {} components, expected {}", obs.size(),
                                     kObservationDim));
    }
    if (policy.centers.size() != policy.n_rbf * kObservationDim ||
        policy.radii.size() != policy.n_rbf * kObservationDim ||
        policy.weights.size() != kNumDams * policy.n_rbf) {
        throw UsageError("policy_act: policy parameter sizes inconsistent");
    }

    std::vector<double> phi(policy.n_rbf);
    for (std::size_t i = 0; i < policy.n_rbf; ++i) {
        double exponent = 0.0;
        for (std::size_t j = 0; j < kObservationDim; ++j) {
            const double z = (obs[j] - policy.center(i, j)) / policy.radius(i, j);
            exponent += z * z;
        }
        phi[i] = std::exp(-exponent);
    }
    Action action{};
    for (std::size_t k = 0; k < kNumDams; ++k) {
        double a = 0.0;
        for (std::size_t i = 0; i < policy.n_rbf; ++i) a += policy.weight(k, i) * phi[i];
        action[k] = a;
    }
    return action;
}

RbfPolicy decode_genome(std::span<const double> genome, std::size_t n_rbf) {
    if (n_rbf == 0) throw UsageError("decode_genome: n_rbf must be >= 1");
    if (genome.size() != genome_length(n_rbf)) {
        throw UsageError(fmt::format("decode_genome: genome has {} genes, expected {} for n_rbf = {}",
                                     genome.size(), genome_length(n_rbf), n_rbf));
    }
    RbfPolicy p;
    p.n_rbf = n_rbf;
    p.centers.resize(n_rbf * kObservationDim);
    p.radii.resize(n_rbf * kObservationDim);
    p.weights.resize(kNumDams * n_rbf);

    std::size_t g = 0;
    for (std::size_t i = 0; i < n_rbf; ++i) {
        for (std::size_t j = 0; j < kObservationDim; ++j) {
            p.centers[i * kObservationDim + j] = std::clamp(genome[g++], 0.0, 1.0);
        }
        for (std::size_t j = 0; j < kObservationDim; ++j) {
            p.radii[i * kObservationDim + j] = std::clamp(genome[g++], kMinRadius, 1.0);
        }
    }
    for (std::size_t k = 0; k < kNumDams; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_rbf; ++i) {
            const double w = std::max(genome[g + k * n_rbf + i], 0.0);
            p.weights[k * n_rbf + i] = w;
            sum += w;
        }
        for (std::size_t i = 0; i < n_rbf; ++i) {
            double& w = p.weights[k * n_rbf + i];
            w = sum > 0.0 ? w / sum : 1.0 / static_cast<double>(n_rbf);
        }
    }
    return p;
}

Genome encode_policy(const RbfPolicy& policy) {
    policy.validate();
    Genome g;
    g.reserve(genome_length(policy.n_rbf));
    for (std::size_t i = 0; i < policy.n_rbf; ++i) {
        for (std::size_t j = 0; j < kObservationDim; ++j) g.push_back(policy.center(i, j));
        for (std::size_t j = 0; j < kObservationDim; ++j) g.push_back(policy.radius(i, j));
    }
    g.insert(g.end(), policy.weights.begin(), policy.weights.end());
    return g;
}

}  // namespace nile
