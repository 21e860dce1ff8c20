#pragma once

// Evolutionary multi-objective direct policy search: RBF release policies
// tuned by NSGA-II against full-episode rollouts.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "nile/env.hpp"
#include "nile/nsga2.hpp"

namespace nile {

struct ArchiveEntry {
    Genome genome;
    Point objectives;
};

/// Mutually non-dominated (genome, objectives) pairs without duplicate
/// objective vectors. Entries keep insertion order.
class NondominatedArchive {
public:
    /// Adds the pair unless an entry dominates or equals it; evicts entries the
    /// new pair dominates. Returns whether it was added.
    bool insert(const Genome& genome, const Point& objectives);

    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    SolutionSet objectives() const;

private:
    std::vector<ArchiveEntry> entries_;
};

/// One function evaluation: decode then roll out on `eval_seed`.
Point evaluate_genome(const Genome& genome, std::size_t n_rbf, const EnvConfig& env,
                      std::uint64_t eval_seed);

using GenomeEvaluator = std::function<Point(const Genome& genome, std::size_t evaluation_index)>;

struct ConvergenceRecord {
    std::size_t nfe = 0;
    double hypervolume = 0.0;
};

struct EmodpsResult {
    NondominatedArchive archive;
    std::vector<ConvergenceRecord> convergence;
    std::vector<Individual> final_population;
    std::size_t nfe = 0;
};

/// NSGA-II on genes in [0, 1]^genome_length with exactly config.nfe_budget
/// calls to `evaluate`. Evaluations of one generation run on up to `threads`
/// threads; results are merged in genome order, so the outcome does not depend
/// on the thread count.
EmodpsResult run_moea(const MoeaConfig& config, std::size_t genome_length, const GenomeEvaluator& evaluate,
                      std::size_t threads = 1);

/// Called once per rollout, possibly from several threads at once.
using EvaluationObserver = std::function<void(std::size_t evaluation_index)>;

/// Policy search on the environment. Fitness uses env.seed as the evaluation
/// seed unless config.resample_inflows is set.
EmodpsResult run_emodps(const EnvConfig& env, const MoeaConfig& config, std::size_t threads = 1,
                        const EvaluationObserver& observer = {});

}  // namespace nile
