#include "nile/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

void MoeaConfig::validate() const {
    if (population_size < 4 || population_size % 2 != 0) {
        throw ConfigError(fmt::format("population_size must be even and >= 4, got {}", population_size));
    }
    if (nfe_budget < population_size) {
        throw ConfigError(
            fmt::format("nfe_budget ({}) must be at least population_size ({})", nfe_budget, population_size));
    }
    if (n_rbf < 1) throw ConfigError("n_rbf must be >= 1");
    if (!(eta_c >= 0.0) || !(eta_m >= 0.0)) throw ConfigError("distribution indices must be >= 0");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("crossover_rate must lie in [0, 1]");
    if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
        throw ConfigError("mutation_rate must lie in [0, 1]");
    }
}

std::vector<double> crowding_distance(const std::vector<Point>& objectives,
                                      const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    const std::size_t d = objectives[front[0]].size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < d; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objectives[front[a]][m] < objectives[front[b]][m];
        });
        const double lo = objectives[front[order.front()]][m];
        const double hi = objectives[front[order.back()]][m];
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (!(hi > lo)) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double gap = objectives[front[order[k + 1]]][m] - objectives[front[order[k - 1]]][m];
            dist[order[k]] += gap / (hi - lo);
        }
    }
    return dist;
}

FrontSort nondominated_sort(const std::vector<Point>& objectives) {
    const std::size_t n = objectives.size();
    if (n == 0) throw UsageError("nondominated_sort: empty input");

    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated_by_me[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objectives[j], objectives[i])) {
                dominated_by_me[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    FrontSort out;
    out.rank.assign(n, 0);
    out.crowding.assign(n, 0.0);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (domination_count[i] == 0) current.push_back(i);
    }
    std::size_t r = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            out.rank[i] = r;
            for (std::size_t j : dominated_by_me[i]) {
                if (--domination_count[j] == 0) next.push_back(j);
            }
        }
        std::sort(next.begin(), next.end());
        const auto dist = crowding_distance(objectives, current);
        for (std::size_t k = 0; k < current.size(); ++k) out.crowding[current[k]] = dist[k];
        out.fronts.push_back(std::move(current));
        current = std::move(next);
        ++r;
    }
    return out;
}

std::pair<Genome, Genome> sbx_crossover(const Genome& a, const Genome& b, double eta, double rate,
                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Genome c1 = a, c2 = b;
    if (u(rng) >= rate) return {c1, c2};

    constexpr double lb = 0.0, ub = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (u(rng) > 0.5) continue;
        if (std::abs(a[i] - b[i]) <= 1e-14) continue;
        const double y1 = std::min(a[i], b[i]);
        const double y2 = std::max(a[i], b[i]);
        const double r = u(rng);

        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            if (r <= 1.0 / alpha) return std::pow(r * alpha, 1.0 / (eta + 1.0));
            return std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
        };
        const double betaq1 = spread(1.0 + 2.0 * (y1 - lb) / (y2 - y1));
        const double betaq2 = spread(1.0 + 2.0 * (ub - y2) / (y2 - y1));
        double x1 = std::clamp(0.5 * ((y1 + y2) - betaq1 * (y2 - y1)), lb, ub);
        double x2 = std::clamp(0.5 * ((y1 + y2) + betaq2 * (y2 - y1)), lb, ub);
        if (u(rng) <= 0.5) std::swap(x1, x2);
        c1[i] = x1;
        c2[i] = x2;
    }
    return {c1, c2};
}

void polynomial_mutation(Genome& g, double eta, double rate, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    constexpr double lb = 0.0, ub = 1.0;
    const double power = 1.0 / (eta + 1.0);
    for (double& y : g) {
        if (u(rng) >= rate) continue;
        const double d1 = (y - lb) / (ub - lb);
        const double d2 = (ub - y) / (ub - lb);
        const double r = u(rng);
        double dq;
        if (r < 0.5) {
            const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(v, power) - 1.0;
        } else {
            const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(v, power);
        }
        y = std::clamp(y + dq * (ub - lb), lb, ub);
    }
}

std::vector<std::size_t> environmental_selection(const std::vector<Point>& pool, std::size_t count) {
    const FrontSort sorted = nondominated_sort(pool);
    std::vector<std::size_t> keep;
    keep.reserve(count);
    for (const auto& front : sorted.fronts) {
        if (keep.size() + front.size() <= count) {
            keep.insert(keep.end(), front.begin(), front.end());
            if (keep.size() == count) break;
            continue;
        }
        std::vector<std::size_t> last = front;
        std::stable_sort(last.begin(), last.end(), [&](std::size_t a, std::size_t b) {
            return sorted.crowding[a] > sorted.crowding[b];
        });
        last.resize(count - keep.size());
        std::sort(last.begin(), last.end());
        keep.insert(keep.end(), last.begin(), last.end());
        break;
    }
    return keep;
}

std::vector<Individual> evolve_generation(const std::vector<Individual>& population, const MoeaConfig& config,
                                          std::mt19937_64& rng, const BatchEvaluator& evaluate,
                                          std::size_t offspring_count, std::vector<Individual>* evaluated) {
    if (population.empty()) throw UsageError("evolve_generation: empty population");
    if (offspring_count == 0) return population;

    std::vector<Point> objs;
    objs.reserve(population.size());
    for (const auto& ind : population) objs.push_back(ind.objectives);
    const FrontSort sorted = nondominated_sort(objs);

    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    auto tournament = [&]() -> const Genome& {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        if (sorted.rank[a] != sorted.rank[b]) return population[sorted.rank[a] < sorted.rank[b] ? a : b].genome;
        return population[sorted.crowding[b] > sorted.crowding[a] ? b : a].genome;
    };

    const std::size_t length = population.front().genome.size();
    const double pm = config.mutation_rate.value_or(1.0 / static_cast<double>(length));
    std::vector<Genome> children;
    children.reserve(offspring_count + 1);
    while (children.size() < offspring_count) {
        const Genome& p1 = tournament();
        const Genome& p2 = tournament();
        auto [c1, c2] = sbx_crossover(p1, p2, config.eta_c, config.crossover_rate, rng);
        polynomial_mutation(c1, config.eta_m, pm, rng);
        polynomial_mutation(c2, config.eta_m, pm, rng);
        children.push_back(std::move(c1));
        children.push_back(std::move(c2));
    }
    children.resize(offspring_count);

    const std::vector<Point> child_objs = evaluate(children);
    if (child_objs.size() != children.size()) throw UsageError("evaluator returned the wrong number of results");

    std::vector<Individual> pool = population;
    for (std::size_t i = 0; i < children.size(); ++i) {
        pool.push_back({children[i], child_objs[i]});
        if (evaluated) evaluated->push_back(pool.back());
    }
    std::vector<Point> pool_objs;
    pool_objs.reserve(pool.size());
    for (const auto& ind : pool) pool_objs.push_back(ind.objectives);

    std::vector<Individual> next;
    next.reserve(population.size());
    for (std::size_t i : environmental_selection(pool_objs, population.size())) next.push_back(pool[i]);
    return next;
}

}  // namespace nile
