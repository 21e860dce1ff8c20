#pragma once

// NSGA-II building blocks over real-valued genomes with genes in [0, 1].
// Objectives are maximized.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "nile/metrics.hpp"
#include "nile/rbf_policy.hpp"

namespace nile {

struct MoeaConfig {
    std::size_t population_size = 100;
    std::size_t nfe_budget = 20000;
    double eta_c = 15.0;
    double crossover_rate = 1.0;
    double eta_m = 20.0;
    /// Per-gene mutation probability; 1 / genome_length when unset.
    std::optional<double> mutation_rate;
    std::uint64_t seed = 0;
    std::size_t n_rbf = 6;
    /// Draw fresh inflows for every evaluation instead of the fixed
    /// evaluation seed.
    bool resample_inflows = false;
    /// Reference point for the convergence log.
    Point hv_reference = {-1.01, -1.01, -0.01, -0.01};

    void validate() const;
};

struct FrontSort {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
    std::vector<std::vector<std::size_t>> fronts;
};

/// Fast non-dominated sort followed by per-front crowding distances. Boundary
/// points of each objective get +inf; objectives with zero spread in a front
/// contribute nothing.
FrontSort nondominated_sort(const std::vector<Point>& objectives);

/// Crowding distances of the points `front` indexes into `objectives`,
/// returned in the order of `front`.
std::vector<double> crowding_distance(const std::vector<Point>& objectives,
                                      const std::vector<std::size_t>& front);

struct Individual {
    Genome genome;
    Point objectives;
};

using BatchEvaluator = std::function<std::vector<Point>(const std::vector<Genome>&)>;

/// Simulated binary crossover of two parents, bounded to [0, 1].
std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, double eta, double rate,
                                        std::mt19937_64& rng);

/// Bounded polynomial mutation in place.
void polynomial_mutation(Genome& g, double eta, double rate, std::mt19937_64& rng);

/// Indices of the `count` survivors of `pool` by (rank, crowding); ties keep
/// pool order.
std::vector<std::size_t> environmental_selection(const std::vector<Point>& pool, std::size_t count);

/// One (mu + lambda) generation: binary tournaments on (rank, crowding), SBX,
/// polynomial mutation, evaluation of `offspring_count` children and
/// selection from parents + children. The population size is preserved.
/// `evaluated`, when given, receives the children with their objectives.
std::vector<Individual> evolve_generation(const std::vector<Individual>& population, const MoeaConfig& config,
                                          std::mt19937_64& rng, const BatchEvaluator& evaluate,
                                          std::size_t offspring_count,
                                          std::vector<Individual>* evaluated = nullptr);

}  // namespace nile
