#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nile/env.hpp"
#include "nile/error.hpp"

using namespace nile;

namespace {

Action random_action(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(rng), u(rng), u(rng), u(rng)};
}

void check_reward_bounds(const RewardVector& r) {
    CHECK(r[kEgyptDeficit] >= -1.0);
    CHECK(r[kEgyptDeficit] <= 0.0);
    CHECK(r[kSudanDeficit] >= -1.0);
    CHECK(r[kSudanDeficit] <= 0.0);
    CHECK((r[kHadLevel] == 0.0 || r[kHadLevel] == 1.0));
    CHECK(r[kGerdPower] >= 0.0);
    CHECK(r[kGerdPower] <= 1.0);
}

}  // namespace

TEST_SUITE("momdp-env") {

TEST_CASE("reset") {
    Environment env{EnvConfig{}};
    const auto obs = env.reset(3);
    CHECK(obs.size() == 5);
    for (double x : obs) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    CHECK(obs[4] == doctest::Approx(1.0 / 12.0));
    CHECK(env.state().t == 0);

    EnvConfig full;
    for (std::size_t i = 0; i < kNumDams; ++i) full.initial_storages[i] = full.basin.reservoirs[i].capacity;
    Environment env_full{full};
    const auto o = env_full.reset(1);
    for (std::size_t i = 0; i < kNumDams; ++i) CHECK(o[i] == 1.0);
}

TEST_CASE("invalid configurations") {
    EnvConfig c;
    c.initial_storages[0] = -1.0;
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.initial_storages[3] = 1e30;
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.horizon = 0;
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.gamma = 0.0;
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.deficit_power = 3;
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.power_reservoir = "Nowhere";
    CHECK_THROWS_AS(Environment{c}, ConfigError);
    c = EnvConfig{};
    c.basin.reservoirs.pop_back();
    CHECK_THROWS_AS(Environment{c}, ConfigError);
}

TEST_CASE("episode length and truncation") {
    Environment env{EnvConfig{}};
    env.reset(5);
    std::mt19937_64 rng(1);
    for (int t = 1; t <= 240; ++t) {
        const auto r = env.step(random_action(rng));
        CHECK(r.terminated == false);
        CHECK(r.truncated == (t == 240));
        CHECK(env.state().t == static_cast<std::size_t>(t));
    }
    CHECK_THROWS_AS(env.step({0, 0, 0, 0}), UsageError);
    env.reset(5);
    CHECK_NOTHROW(env.step({0, 0, 0, 0}));
}

TEST_CASE("determinism under identical actions") {
    Environment a{EnvConfig{}}, b{EnvConfig{}};
    CHECK(a.reset(17) == b.reset(17));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 240; ++t) {
        const auto act = random_action(rng);
        const auto ra = a.step(act);
        const auto rb = b.step(act);
        REQUIRE(ra.observation == rb.observation);
        REQUIRE(ra.reward == rb.reward);
    }
    Environment c{EnvConfig{}};
    c.reset(18);
    CHECK(c.state().inflows != a.state().inflows);
}

TEST_CASE("actions are clamped") {
    Environment a{EnvConfig{}}, b{EnvConfig{}};
    a.reset(4);
    b.reset(4);
    for (int t = 0; t < 24; ++t) {
        const auto ra = a.step({1.7, -0.3, 1.0, 2.0});
        const auto rb = b.step({1.0, 0.0, 1.0, 1.0});
        CHECK(ra.applied_action == rb.applied_action);
        CHECK(ra.observation == rb.observation);
        CHECK(ra.reward == rb.reward);
    }
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(a.step({nan, 0.5, 0.5, 0.5}).applied_action[0] == 0.0);
}

TEST_CASE("zero release with no evaporation only gains water") {
    EnvConfig c;
    c.stochastic = false;
    for (auto& r : c.basin.reservoirs) r.evap_rate_by_month.fill(0.0);
    Environment env{c};
    env.reset(0);
    auto prev = env.state().storages;
    for (int t = 0; t < 240; ++t) {
        const auto r = env.step({0, 0, 0, 0});
        for (std::size_t i = 0; i < kNumDams; ++i) CHECK(r.flows.storages[i].storage >= prev[i].storage);
        prev = r.flows.storages;
    }
}

TEST_CASE("compute_rewards") {
    RewardInputs in;
    in.egypt_demand = 5e9;
    in.sudan_demand = 1e9;
    in.min_power_level_had = 159.0;
    in.gerd_installed_capacity = 5150e6;
    in.seconds = seconds_in_month(3);

    SUBCASE("demand fully met") {
        in.egypt_delivered = 5e9;
        in.sudan_delivered = 1e9;
        const auto r = compute_rewards(in);
        CHECK(r[kEgyptDeficit] == 0.0);
        CHECK(r[kSudanDeficit] == 0.0);
        CHECK_FALSE(std::signbit(r[kEgyptDeficit]));
    }
    SUBCASE("nothing delivered") {
        const auto r = compute_rewards(in);
        CHECK(r[kEgyptDeficit] == -1.0);
        CHECK(r[kSudanDeficit] == -1.0);
    }
    SUBCASE("partial delivery, linear and squared") {
        in.egypt_delivered = 2.5e9;
        in.sudan_delivered = 0.75e9;
        CHECK(compute_rewards(in, 1)[kEgyptDeficit] == doctest::Approx(-0.5));
        CHECK(compute_rewards(in, 1)[kSudanDeficit] == doctest::Approx(-0.25));
        CHECK(compute_rewards(in, 2)[kEgyptDeficit] == doctest::Approx(-0.25));
        CHECK(compute_rewards(in, 2)[kSudanDeficit] == doctest::Approx(-0.0625));
    }
    SUBCASE("zero demand") {
        in.egypt_demand = 0.0;
        CHECK(compute_rewards(in)[kEgyptDeficit] == 0.0);
    }
    SUBCASE("HAD threshold") {
        in.had_level = 159.0;
        CHECK(compute_rewards(in)[kHadLevel] == 1.0);
        in.had_level = 158.999;
        CHECK(compute_rewards(in)[kHadLevel] == 0.0);
    }
    SUBCASE("GERD at installed capacity") {
        in.gerd_energy = in.gerd_installed_capacity * in.seconds;
        CHECK(compute_rewards(in)[kGerdPower] == 1.0);
    }
}

TEST_CASE("full-power month gives EH = 1 in the environment") {
    EnvConfig c;
    c.initial_storages[0] = c.basin.reservoirs[0].capacity;
    Environment env{c};
    env.reset(0);
    const auto r = env.step({1, 0, 0, 0});
    // 7000 m^3/s clipped to 4500 at ~130 m of head is well above 5150 MW
    CHECK(r.reward[kGerdPower] == 1.0);
}

TEST_CASE("rollout") {
    const EnvConfig c;
    const Policy zero = [](const Observation&) { return Action{0, 0, 0, 0}; };

    const auto a = rollout(c, zero, 9, true);
    CHECK(a.trajectory.size() == 240);
    CHECK(a.trajectory.front().t == 0);
    CHECK(a.trajectory.back().t == 239);
    CHECK(a.objectives[kGerdPower] == 0.0);
    CHECK(rollout(c, zero, 9).objectives == a.objectives);

    SUBCASE("objective is the mean reward") {
        RewardVector mean{};
        for (const auto& row : a.trajectory)
            for (std::size_t k = 0; k < 4; ++k) mean[k] += row.reward[k];
        for (std::size_t k = 0; k < 4; ++k) CHECK(a.objectives[k] == doctest::Approx(mean[k] / 240.0));
    }
    SUBCASE("discounted objective is normalized") {
        EnvConfig g = c;
        g.gamma = 0.9;
        std::mt19937_64 rng(3);
        std::vector<Action> actions(240);
        for (auto& x : actions) x = random_action(rng);
        std::size_t t = 0;
        const Policy replay = [&](const Observation&) { return actions[t++]; };
        const auto r = rollout(g, replay, 2, true);
        double num = 0.0, den = 0.0, d = 1.0;
        for (const auto& row : r.trajectory) {
            num += d * row.reward[kSudanDeficit];
            den += d;
            d *= 0.9;
        }
        CHECK(r.objectives[kSudanDeficit] == doctest::Approx(num / den));
    }
    SUBCASE("trajectory csv") {
        std::ostringstream os;
        write_trajectory_csv(os, a.trajectory);
        const std::string s = os.str();
        CHECK(s.rfind("t,storage_gerd,storage_roseires,storage_sennar,storage_had,a1,a2,a3,a4,r_ed,r_sd,r_had,r_eh\n",
                      0) == 0);
        CHECK(std::count(s.begin(), s.end(), '\n') == 241);
    }
}

TEST_CASE("randomized episodes respect observation and reward bounds") {
    std::mt19937_64 rng(77);
    for (int ep = 0; ep < 10; ++ep) {
        Environment env{EnvConfig{}};
        auto obs = env.reset(rng());
        bool done = false;
        while (!done) {
            const auto r = env.step(random_action(rng));
            for (double x : r.observation) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
            }
            for (std::size_t i = 0; i < kNumDams; ++i) {
                CHECK(r.flows.storages[i].storage >= 0.0);
                CHECK(r.flows.storages[i].storage <= env.config().basin.reservoirs[i].capacity);
            }
            check_reward_bounds(r.reward);
            done = r.truncated;
        }
    }
}

TEST_CASE("start month shifts the calendar") {
    EnvConfig c;
    c.start_month = 10;
    Environment env{c};
    CHECK(env.reset(0)[4] == doctest::Approx(10.0 / 12.0));
    env.step({0, 0, 0, 0});
    env.step({0, 0, 0, 0});
    const auto r = env.step({0, 0, 0, 0});
    CHECK(r.month == 12);
    CHECK(r.observation[4] == doctest::Approx(1.0 / 12.0));
}

}  // TEST_SUITE
