#include "nile/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

namespace {

std::size_t require_reservoir(const Basin& b, const std::string& name) {
    auto i = b.reservoir_index(name);
    if (!i) throw ConfigError(fmt::format("env: unknown reservoir '{}'", name));
    return *i;
}

std::size_t require_demand(const Basin& b, const std::string& name) {
    auto i = b.demand_index(name);
    if (!i) throw ConfigError(fmt::format("env: unknown demand site '{}'", name));
    return *i;
}

// Independent stream per inflow source so adding a source leaves the others unchanged.
std::uint64_t source_seed(std::uint64_t episode_seed, std::size_t source) {
    std::seed_seq seq{static_cast<std::uint32_t>(episode_seed), static_cast<std::uint32_t>(episode_seed >> 32),
                      static_cast<std::uint32_t>(source), 0x4e494c45u};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

double deficit_term(double delivered, double demand, int power) {
    if (demand <= 0.0) return 0.0;
    const double frac = std::clamp((demand - delivered) / demand, 0.0, 1.0);
    if (frac == 0.0) return 0.0;
    return -(power == 2 ? frac * frac : frac);
}

}  // namespace

void EnvConfig::validate() const {
    basin.validate();
    if (basin.reservoirs.size() != kNumDams) {
        throw ConfigError(fmt::format("env: basin must have exactly {} reservoirs, found {}", kNumDams,
                                      basin.reservoirs.size()));
    }
    if (horizon < 1) throw ConfigError("env: horizon must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("env: gamma must lie in (0, 1]");
    if (deficit_power != 1 && deficit_power != 2) throw ConfigError("env: deficit_power must be 1 or 2");
    if (start_month < 1 || start_month > kMonthsPerYear) throw ConfigError("env: start_month must be 1..12");
    if (initial_storages.size() != basin.reservoirs.size()) {
        throw ConfigError("env: one initial storage per reservoir required");
    }
    for (std::size_t i = 0; i < initial_storages.size(); ++i) {
        const double s = initial_storages[i];
        if (!(s >= 0.0 && s <= basin.reservoirs[i].capacity)) {
            throw ConfigError(fmt::format("env: initial storage of '{}' outside [0, capacity]",
                                          basin.reservoirs[i].name));
        }
    }
    const auto power = require_reservoir(basin, power_reservoir);
    require_reservoir(basin, level_reservoir);
    require_demand(basin, egypt_demand);
    require_demand(basin, sudan_demand);
    if (!basin.plant_for(basin.reservoirs[power].name)) {
        throw ConfigError(fmt::format("env: reservoir '{}' has no hydropower plant", power_reservoir));
    }
    for (const auto& q : basin.inflows) {
        if (q.mode == InflowMode::DeterministicTrace && q.trace.size() < horizon) {
            throw ConfigError(fmt::format("inflow '{}': trace shorter than the episode horizon", q.name));
        }
    }
}

RewardVector compute_rewards(const RewardInputs& in, int deficit_power) {
    RewardVector r{};
    r[kEgyptDeficit] = deficit_term(in.egypt_delivered, in.egypt_demand, deficit_power);
    r[kSudanDeficit] = deficit_term(in.sudan_delivered, in.sudan_demand, deficit_power);
    r[kHadLevel] = in.had_level >= in.min_power_level_had ? 1.0 : 0.0;
    r[kGerdPower] = std::clamp(in.gerd_energy / (in.gerd_installed_capacity * in.seconds), 0.0, 1.0);
    return r;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
    config_.validate();
    plan_ = make_routing_plan(config_.basin);
    power_reservoir_ = *config_.basin.reservoir_index(config_.power_reservoir);
    level_reservoir_ = *config_.basin.reservoir_index(config_.level_reservoir);
    egypt_ = *config_.basin.demand_index(config_.egypt_demand);
    sudan_ = *config_.basin.demand_index(config_.sudan_demand);
    reset();
}

Observation Environment::reset(std::uint64_t seed) {
    state_ = EnvState{};
    state_.seed = seed;
    for (double s : config_.initial_storages) state_.storages.push_back({s});
    const auto& inflows = config_.basin.inflows;
    for (std::size_t i = 0; i < inflows.size(); ++i) {
        state_.inflows.push_back(generate_inflows(inflows[i], config_.horizon, source_seed(seed, i),
                                                  config_.start_month, config_.stochastic));
    }
    return observe();
}

Observation Environment::observe() const {
    Observation obs{};
    for (std::size_t i = 0; i < kNumDams; ++i) {
        obs[i] = std::clamp(state_.storages[i].storage / config_.basin.reservoirs[i].capacity, 0.0, 1.0);
    }
    obs[kNumDams] = static_cast<double>(month_at(config_.start_month, state_.t)) / kMonthsPerYear;
    return obs;
}

StepResult Environment::step(const Action& action) {
    if (state_.truncated) throw UsageError("step called on a truncated episode; call reset first");

    const auto& basin = config_.basin;
    const int month = month_at(config_.start_month, state_.t);
    const double dt = seconds_in_month(month);

    StepResult out;
    out.month = month;
    std::vector<double> requested(kNumDams);
    for (std::size_t i = 0; i < kNumDams; ++i) {
        // NaN maps to 0.
        const double a = std::isnan(action[i]) ? 0.0 : std::clamp(action[i], 0.0, 1.0);
        out.applied_action[i] = a;
        requested[i] = a * basin.reservoirs[i].max_release * dt;
    }
    std::vector<double> sources(basin.inflows.size());
    for (std::size_t i = 0; i < sources.size(); ++i) sources[i] = state_.inflows[i][state_.t];

    out.flows = route_month(basin, plan_, state_.storages, requested, sources, month);

    const auto& gerd = basin.reservoirs[power_reservoir_];
    const HydroPlantSpec& plant = *basin.plant_for(gerd.name);
    const double mid_storage =
        0.5 * (state_.storages[power_reservoir_].storage + out.flows.storages[power_reservoir_].storage);
    const double head = level_area_from_storage(gerd, mid_storage).level - plant.tailwater_level;
    out.gerd_energy = hydropower_energy(plant, out.flows.release[power_reservoir_] / dt, head, dt);
    out.had_level =
        level_area_from_storage(basin.reservoirs[level_reservoir_], out.flows.storages[level_reservoir_].storage)
            .level;

    const auto m = static_cast<std::size_t>(month - 1);
    RewardInputs in;
    in.egypt_delivered = out.flows.delivered[egypt_];
    in.egypt_demand = basin.demands[egypt_].monthly_demand[m];
    in.sudan_delivered = out.flows.delivered[sudan_];
    in.sudan_demand = basin.demands[sudan_].monthly_demand[m];
    in.had_level = out.had_level;
    in.min_power_level_had = config_.min_power_level_had;
    in.gerd_energy = out.gerd_energy;
    in.gerd_installed_capacity = plant.installed_capacity;
    in.seconds = dt;
    out.reward = compute_rewards(in, config_.deficit_power);

    state_.storages = out.flows.storages;
    ++state_.t;
    state_.truncated = state_.t >= config_.horizon;
    out.truncated = state_.truncated;
    out.observation = observe();
    return out;
}

RolloutResult rollout(const EnvConfig& config, const Policy& policy, std::uint64_t seed,
                      bool record_trajectory) {
    Environment env(config);
    Observation obs = env.reset(seed);
    RolloutResult result;
    if (record_trajectory) result.trajectory.reserve(config.horizon);

    RewardVector acc{};
    double discount = 1.0;
    double weight = 0.0;
    bool done = false;
    while (!done) {
        const Action action = policy(obs);
        TrajectoryRow row;
        if (record_trajectory) {
            row.t = env.state().t;
            for (std::size_t i = 0; i < kNumDams; ++i) row.storages[i] = env.state().storages[i].storage;
        }
        const StepResult step = env.step(action);
        for (std::size_t k = 0; k < kNumObjectives; ++k) acc[k] += discount * step.reward[k];
        weight += discount;
        discount *= config.gamma;
        if (record_trajectory) {
            row.action = step.applied_action;
            row.reward = step.reward;
            result.trajectory.push_back(row);
        }
        obs = step.observation;
        done = step.truncated || step.terminated;
    }
    for (std::size_t k = 0; k < kNumObjectives; ++k) result.objectives[k] = acc[k] / weight;
    return result;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
    os << "t,storage_gerd,storage_roseires,storage_sennar,storage_had,a1,a2,a3,a4,r_ed,r_sd,r_had,r_eh\n";
    for (const auto& row : rows) {
        os << row.t;
        for (double v : row.storages) os << ',' << fmt::format("{}", v);
        for (double v : row.action) os << ',' << fmt::format("{}", v);
        for (double v : row.reward) os << ',' << fmt::format("{}", v);
        os << '\n';
    }
}

}  // namespace nile
