#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nile/error.hpp"
#include "nile/metrics.hpp"
#include "oracles.hpp"

using namespace nile;

namespace {

SolutionSet permute_axes(const SolutionSet& s, const std::vector<std::size_t>& perm) {
    SolutionSet out;
    for (const auto& p : s) {
        Point q(p.size());
        for (std::size_t j = 0; j < perm.size(); ++j) q[j] = p[perm[j]];
        out.push_back(q);
    }
    return out;
}

}  // namespace

TEST_SUITE("mo-metrics") {

TEST_CASE("dominates") {
    CHECK(dominates(Point{2, 2}, Point{1, 2}));
    CHECK_FALSE(dominates(Point{1, 2}, Point{2, 1}));
    CHECK_FALSE(dominates(Point{2, 1}, Point{1, 2}));
    CHECK_FALSE(dominates(Point{1, 2}, Point{1, 2}));
    CHECK_THROWS_AS(dominates(Point{1, 2}, Point{1, 2, 3}), UsageError);
}

TEST_CASE("pareto_filter examples") {
    CHECK(pareto_filter({{1, 2}, {2, 1}, {0, 0}}) == SolutionSet{{1, 2}, {2, 1}});
    CHECK(pareto_filter({{4, 4, 4}}) == SolutionSet{{4, 4, 4}});
    const SolutionSet nd = {{0, 3}, {1, 2}, {2, 1}, {3, 0}};
    CHECK(pareto_filter(nd) == nd);
    CHECK(pareto_filter({{1, 1}, {1, 1}, {0, 2}}) == SolutionSet{{1, 1}, {0, 2}});
    CHECK(pareto_filter({}).empty());
    CHECK_THROWS_AS(pareto_filter({{1, 2}, {1}}), UsageError);
    CHECK_THROWS_AS(pareto_filter({{1, NAN}}), UsageError);
}

TEST_CASE("pareto_filter matches brute force") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 150; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(i % 3);
        const auto s = i % 2 ? oracle::random_set(rng, 1 + rng() % 120, d, 8)
                             : oracle::random_continuous_set(rng, 1 + rng() % 120, d);
        const auto f = pareto_filter(s);
        CHECK(f == oracle::pareto(s));
        CHECK(pareto_filter(f) == f);
    }
}

TEST_CASE("hypervolume examples") {
    const Point o2 = {0, 0};
    CHECK(hypervolume({{2, 3}}, o2) == 6.0);
    CHECK(hypervolume({{1, 2}, {2, 1}}, o2) == 3.0);
    CHECK(hypervolume({{1, 1}, {2, 2}}, o2) == 4.0);
    CHECK(hypervolume({}, o2) == 0.0);
    CHECK(hypervolume({{-1, 5}}, o2) == 0.0);
    CHECK(hypervolume({{0, 5}}, o2) == 0.0);
    CHECK(hypervolume({{1, 2, 3}, {3, 2, 1}}, Point{0, 0, 0}) == 6.0 + 6.0 - 2.0);
    CHECK(hypervolume({{1, 1, 1, 1}, {2, 1, 1, 1}}, Point{0, 0, 0, 0}) == 2.0);
    CHECK(hypervolume({{1, 2, 1, 2}, {2, 1, 2, 1}}, Point{0, 0, 0, 0}) == 4.0 + 4.0 - 1.0);
    CHECK(hypervolume({{3}}, Point{1}) == 2.0);
    CHECK_THROWS_AS(hypervolume({{1, 2}}, Point{0, 0, 0}), UsageError);

    for (const SolutionSet& s : std::vector<SolutionSet>{{{1, 2}, {2, 1}}, {{1, 1}, {2, 2}}, {{2, 3}}}) {
        CHECK(hypervolume(s, o2) == doctest::Approx(oracle::hv_inclusion_exclusion(s, o2)));
    }
}

TEST_CASE("hypervolume matches inclusion-exclusion on small random sets") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(i % 4);
        const auto s = i % 2 ? oracle::random_set(rng, 1 + rng() % 10, d, 6)
                             : oracle::random_continuous_set(rng, 1 + rng() % 10, d);
        const Point ref(d, i % 3 == 0 ? 0.2 : 0.0);
        // inclusion-exclusion is valid only over the points above ref
        oracle::Set above;
        for (const auto& p : s)
            if (std::all_of(p.begin(), p.end(), [&](double x) { return x > ref[0]; })) above.push_back(p);
        CHECK(hypervolume(s, ref) == doctest::Approx(oracle::hv_inclusion_exclusion(above, ref)).epsilon(1e-12));
    }
}

TEST_CASE("hypervolume properties") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(i % 3);
        auto s = oracle::random_continuous_set(rng, 2 + rng() % 30, d);
        const Point ref(d, 0.0);
        const double hv = hypervolume(s, ref);

        // dominated additions change nothing, any addition never lowers it
        auto more = s;
        Point dominated = s[0];
        for (double& x : dominated) x *= u(rng);
        more.push_back(dominated);
        CHECK(hypervolume(more, ref) == doctest::Approx(hv).epsilon(1e-12));
        more.push_back(oracle::random_continuous_set(rng, 1, d)[0]);
        CHECK(hypervolume(more, ref) >= hv * (1 - 1e-12));

        auto shuffled = s;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(hypervolume(shuffled, ref) == doctest::Approx(hv).epsilon(1e-12));

        std::vector<std::size_t> perm(d);
        for (std::size_t j = 0; j < d; ++j) perm[j] = j;
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(hypervolume(permute_axes(s, perm), ref) == doctest::Approx(hv).epsilon(1e-12));
    }
}

TEST_CASE("hypervolume agrees with Monte-Carlo on a 4-d set") {
    std::mt19937_64 rng(4);
    const auto s = oracle::random_continuous_set(rng, 12, 4);
    const Point ref(4, 0.0);
    const double mc = oracle::hv_monte_carlo(s, ref, 200000, 9);
    CHECK(std::abs(hypervolume(s, ref) - mc) / mc < 0.02);
}

TEST_CASE("hypervolume handles a large 4-d front") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    SolutionSet s;
    for (int i = 0; i < 300; ++i) {
        Point p(4);
        double norm = 0.0;
        for (double& x : p) norm += (x = std::abs(n(rng))) * x;
        for (double& x : p) x /= std::sqrt(norm);
        s.push_back(p);
    }
    const double hv = hypervolume(s, Point(4, 0.0));
    CHECK(hv > 0.0);
    CHECK(hv < std::pow(M_PI, 2) / 32.0);  // the positive orthant of the unit 4-ball
}

TEST_CASE("sparsity") {
    CHECK(sparsity({{3, 4}}) == 0.0);
    CHECK(sparsity({{0, 0}, {1, 1}}) == 2.0);
    CHECK(sparsity({{0, 2}, {1, 1}, {2, 0}}) == 2.0);
    CHECK_THROWS_AS(sparsity({}), UsageError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        auto s = oracle::random_continuous_set(rng, 2 + rng() % 40, 2 + rng() % 3);
        const double sp = sparsity(s);
        const double alpha = a(rng);
        auto scaled = s;
        for (auto& p : scaled)
            for (double& x : p) x *= alpha;
        CHECK(sparsity(scaled) == doctest::Approx(alpha * alpha * sp).epsilon(1e-9));
        std::shuffle(s.begin(), s.end(), rng);
        CHECK(sparsity(s) == doctest::Approx(sp).epsilon(1e-12));
    }
}

TEST_CASE("merge_and_filter") {
    const SolutionSet a = {{0, 3}, {3, 0}};
    const SolutionSet b = {{1, 2}, {2, 1}};
    CHECK(oracle::same_elements(merge_and_filter({a, b}), {{0, 3}, {3, 0}, {1, 2}, {2, 1}}));
    CHECK(merge_and_filter({a, a}) == a);
    const SolutionSet c = {{4, 4}, {5, 3}};
    CHECK(oracle::same_elements(merge_and_filter({b, c}), c));
    CHECK(merge_and_filter({b}) == pareto_filter(b));
    CHECK(merge_and_filter({{}, b}) == b);
    CHECK_THROWS_AS(merge_and_filter({a, {{1, 2, 3}}}), UsageError);

    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        std::vector<SolutionSet> sets;
        oracle::Set all;
        for (int k = 0; k < 5; ++k) {
            sets.push_back(oracle::random_set(rng, rng() % 30, 3, 5));
            all.insert(all.end(), sets.back().begin(), sets.back().end());
        }
        CHECK(oracle::same_elements(merge_and_filter(sets), oracle::pareto(all)));
    }
}

TEST_CASE("default_reference_point") {
    const auto r = default_reference_point({{{0, 10}, {2, 20}}, {{1, 30}}});
    CHECK(r[0] == doctest::Approx(-0.02));
    CHECK(r[1] == doctest::Approx(9.8));
    const auto flat = default_reference_point({{{1, 1}}});
    CHECK(flat[0] == doctest::Approx(1.0 - 1e-9));
    CHECK_THROWS_AS(default_reference_point({{}}), UsageError);

    // every point contributes against it
    std::mt19937_64 rng(7);
    const auto s = oracle::random_continuous_set(rng, 20, 4);
    const auto ref = default_reference_point({s});
    for (const auto& p : s)
        for (std::size_t j = 0; j < 4; ++j) CHECK(p[j] > ref[j]);
}

TEST_CASE("baseline percentages") {
    CHECK(baseline_percentage(2.21e8, 2.21e8) == 100);
    CHECK(baseline_percentage(1.50e8, 2.21e8) == 68);
    CHECK(baseline_percentage(2.26e7, 2.21e8) == 10);
    CHECK(baseline_percentage(2.03e6, 2.21e8) == 1);
    CHECK_THROWS_AS(baseline_percentage(1.0, 0.0), UsageError);

    std::vector<MetricsRow> rows = {{"A", 2.21e8, {}, 10, 1.0}, {"B", 1.50e8, {}, 5, 2.0}};
    const auto rep = baseline_percentages(rows, "A", {0, 0});
    CHECK(rep.rows[0].pct_of_baseline == 100);
    CHECK(rep.rows[1].pct_of_baseline == 68);
    CHECK_THROWS_AS(baseline_percentages(rows, "C"), UsageError);
    rows[0].hypervolume = 0.0;
    CHECK_THROWS_AS(baseline_percentages(rows, "A"), UsageError);
}

TEST_CASE("evaluate_set filters before measuring") {
    const auto row = evaluate_set("x", {{1, 2}, {2, 1}, {0, 0}, {1, 2}}, Point{0, 0});
    CHECK(row.cardinality == 2);
    CHECK(row.hypervolume == 3.0);
    CHECK(row.sparsity == 2.0);
    const auto empty = evaluate_set("e", {}, Point{0, 0});
    CHECK(empty.cardinality == 0);
    CHECK(empty.hypervolume == 0.0);
}

}  // TEST_SUITE
