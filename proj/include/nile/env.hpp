#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nile/basin.hpp"

namespace nile {

inline constexpr std::size_t kNumDams = 4;
inline constexpr std::size_t kObservationDim = kNumDams + 1;
inline constexpr std::size_t kNumObjectives = 4;

/// Normalized storages of the four dams followed by the normalized month.
using Observation = std::array<double, kObservationDim>;
/// Release fractions of max_release, ordered GERD, Roseires, Sennar, HAD.
using Action = std::array<double, kNumDams>;
/// Egypt deficit, Sudan deficit, HAD level reliability, GERD hydropower. All maximized.
using RewardVector = std::array<double, kNumObjectives>;

enum Objective : std::size_t { kEgyptDeficit = 0, kSudanDeficit = 1, kHadLevel = 2, kGerdPower = 3 };

inline constexpr std::array<const char*, kNumObjectives> kObjectiveLabels = {"ED", "SD", "HAD", "EH"};

struct EnvConfig {
    Basin basin = default_basin();
    std::size_t horizon = 240;
    double gamma = 1.0;
    /// One volume per basin reservoir, in basin order.
    std::vector<double> initial_storages = {30.0e9, 5.0e9, 0.6e9, 120.0e9};
    double min_power_level_had = 159.0;
    /// false: lognormal inflow models yield their monthly means.
    bool stochastic = true;
    std::uint64_t seed = 0;
    int deficit_power = 1;
    int start_month = 1;

    std::string power_reservoir = "GERD";
    std::string level_reservoir = "HAD";
    std::string egypt_demand = "Egypt";
    std::string sudan_demand = "Sudan";

    void validate() const;
};

struct EnvState {
    std::vector<ReservoirState> storages;
    std::size_t t = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> inflows;  // per inflow model, m^3/month
    bool truncated = false;
};

struct RewardInputs {
    double egypt_delivered = 0.0;
    double egypt_demand = 0.0;
    double sudan_delivered = 0.0;
    double sudan_demand = 0.0;
    double had_level = 0.0;
    double min_power_level_had = 0.0;
    double gerd_energy = 0.0;
    double gerd_installed_capacity = 1.0;
    double seconds = 1.0;
};

/// Deficits are -(shortfall/demand)^deficit_power (0 for zero demand); the HAD
/// component is 1 when the level reaches the minimum power level; hydropower is
/// energy over installed capacity times the month's length.
RewardVector compute_rewards(const RewardInputs& in, int deficit_power = 1);

struct StepResult {
    Observation observation{};
    RewardVector reward{};
    bool terminated = false;
    bool truncated = false;
    int month = 1;
    Action applied_action{};
    RoutingResult flows;
    double gerd_energy = 0.0;
    double had_level = 0.0;
};

class Environment {
public:
    explicit Environment(EnvConfig config);

    /// Restores the initial storages and draws this episode's inflows.
    Observation reset(std::uint64_t seed);
    Observation reset() { return reset(config_.seed); }

    /// Advances one month. Throws UsageError once the episode is truncated.
    StepResult step(const Action& action);

    Observation observe() const;
    const EnvState& state() const { return state_; }
    const EnvConfig& config() const { return config_; }

private:
    EnvConfig config_;
    RoutingPlan plan_;
    std::size_t power_reservoir_ = 0;
    std::size_t level_reservoir_ = 0;
    std::size_t egypt_ = 0;
    std::size_t sudan_ = 0;
    EnvState state_;
};

using Policy = std::function<Action(const Observation&)>;

struct TrajectoryRow {
    std::size_t t = 0;
    std::array<double, kNumDams> storages{};  // at decision time
    Action action{};                          // after clamping
    RewardVector reward{};
};

struct RolloutResult {
    RewardVector objectives{};
    std::vector<TrajectoryRow> trajectory;
};

/// Runs a whole episode. Objectives are the per-component reward mean, or the
/// discounted sum normalized by the sum of discounts when gamma < 1.
RolloutResult rollout(const EnvConfig& config, const Policy& policy, std::uint64_t seed,
                      bool record_trajectory = false);

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);

}  // namespace nile
