#include "nile/emodps.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "nile/error.hpp"

namespace nile {

bool NondominatedArchive::insert(const Genome& genome, const Point& objectives) {
    for (const auto& e : entries_) {
        if (e.objectives == objectives || dominates(e.objectives, objectives)) return false;
    }
    std::erase_if(entries_, [&](const ArchiveEntry& e) { return dominates(objectives, e.objectives); });
    entries_.push_back({genome, objectives});
    return true;
}

SolutionSet NondominatedArchive::objectives() const {
    SolutionSet out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.objectives);
    return out;
}

Point evaluate_genome(const Genome& genome, std::size_t n_rbf, const EnvConfig& env, std::uint64_t eval_seed) {
    const RbfPolicy policy = decode_genome(genome, n_rbf);
    const auto result = rollout(env, [&](const Observation& obs) { return policy_act(policy, obs); }, eval_seed);
    return {result.objectives.begin(), result.objectives.end()};
}

namespace {

std::vector<Point> evaluate_batch(const std::vector<Genome>& genomes, std::size_t first_index,
                                  const GenomeEvaluator& evaluate, std::size_t threads) {
    std::vector<Point> out(genomes.size());
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(genomes.size(), 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < genomes.size(); ++i) out[i] = evaluate(genomes[i], first_index + i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < genomes.size(); i += workers) {
                        out[i] = evaluate(genomes[i], first_index + i);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace

EmodpsResult run_moea(const MoeaConfig& config, std::size_t genome_length, const GenomeEvaluator& evaluate,
                      std::size_t threads) {
    config.validate();
    if (genome_length == 0) throw UsageError("run_moea: genome length must be >= 1");

    EmodpsResult result;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto log_progress = [&] {
        result.convergence.push_back({result.nfe, hypervolume(result.archive.objectives(), config.hv_reference)});
    };

    std::vector<Genome> initial(config.population_size, Genome(genome_length));
    for (auto& g : initial) {
        for (double& x : g) x = unit(rng);
    }
    const auto initial_objs = evaluate_batch(initial, 0, evaluate, threads);
    result.nfe = initial.size();
    std::vector<Individual> population;
    population.reserve(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        population.push_back({initial[i], initial_objs[i]});
        result.archive.insert(initial[i], initial_objs[i]);
    }
    log_progress();

    while (result.nfe < config.nfe_budget) {
        const std::size_t offspring = std::min(config.population_size, config.nfe_budget - result.nfe);
        const std::size_t first = result.nfe;
        BatchEvaluator batch = [&](const std::vector<Genome>& genomes) {
            return evaluate_batch(genomes, first, evaluate, threads);
        };
        std::vector<Individual> children;
        population = evolve_generation(population, config, rng, batch, offspring, &children);
        result.nfe += children.size();
        for (const auto& c : children) result.archive.insert(c.genome, c.objectives);
        log_progress();
    }
    result.final_population = std::move(population);
    return result;
}

EmodpsResult run_emodps(const EnvConfig& env, const MoeaConfig& config, std::size_t threads,
                        const EvaluationObserver& observer) {
    env.validate();
    const std::size_t n_rbf = config.n_rbf;
    GenomeEvaluator evaluate = [&](const Genome& g, std::size_t index) {
        std::uint64_t seed = env.seed;
        if (config.resample_inflows) {
            std::seed_seq seq{static_cast<std::uint32_t>(env.seed), static_cast<std::uint32_t>(env.seed >> 32),
                              static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
            std::array<std::uint32_t, 2> words{};
            seq.generate(words.begin(), words.end());
            seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        }
        if (observer) observer(index);
        return evaluate_genome(g, n_rbf, env, seed);
    };
    return run_moea(config, genome_length(n_rbf), evaluate, threads);
}

}  // namespace nile
