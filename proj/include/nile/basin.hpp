#pragma once

// Monthly water balance of a reservoir cascade.
//
// Units: volumes in m^3, flows in m^3/s, levels in m, areas in m^2, energy in J.
// Monthly quantities (inflow, release, demand) are volumes per month.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nile/calendar.hpp"
#include "nile/inflow.hpp"

namespace nile {

inline constexpr double kWaterDensity = 1000.0;  // kg/m^3
inline constexpr double kGravity = 9.81;         // m/s^2

struct LevelStorageKnot {
    double storage = 0.0;  // m^3
    double level = 0.0;    // m
    double area = 0.0;     // m^2
};

struct ReservoirSpec {
    std::string name;
    double capacity = 0.0;
    double dead_storage = 0.0;
    std::vector<LevelStorageKnot> level_storage_table;
    double max_release = 0.0;        // m^3/s
    MonthlyValues evap_rate_by_month{};  // m of depth per month

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

struct ReservoirState {
    double storage = 0.0;
};

struct HydroPlantSpec {
    std::string name;
    std::string reservoir;  // name of the reservoir feeding the turbines
    double efficiency = 0.9;
    double installed_capacity = 0.0;  // W
    double turbine_max_flow = 0.0;    // m^3/s
    double tailwater_level = 0.0;     // m

    void validate() const;
};

struct DemandSite {
    std::string name;
    MonthlyValues monthly_demand{};  // m^3/month

    void validate() const;
};

struct LevelArea {
    double level = 0.0;
    double area = 0.0;
};

/// Piecewise-linear interpolation on the level-storage-area table, clamped to
/// the end knots outside the tabulated range.
LevelArea level_area_from_storage(const ReservoirSpec& spec, double storage);

/// Largest release (m^3 over `dt` seconds) that honours the request, the outlet
/// capacity and the dead storage.
double feasible_release(const ReservoirSpec& spec, const ReservoirState& state,
                        double requested, double dt);

struct ReservoirStepResult {
    ReservoirState state;
    double outflow = 0.0;  // release + spill
    double spill = 0.0;
    double evap_loss = 0.0;
};

/// One month of mass balance: s' = s + inflow - release - evap, with spill over
/// capacity. Evaporation uses the surface area of s + inflow - release and is
/// truncated so storage stays non-negative. `release` must already be feasible
/// with respect to s + inflow.
ReservoirStepResult reservoir_step(const ReservoirSpec& spec, const ReservoirState& state,
                                   double inflow, double release, int month);

/// Energy produced over `dt` seconds by turbining `flow` under `head`.
double hydropower_energy(const HydroPlantSpec& plant, double flow, double head, double dt);

// ---------------------------------------------------------------------------
// Topology

enum class NodeKind { Reservoir, Demand, Confluence, Inflow, Sink };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

struct TopologyNode {
    std::string id;
    NodeKind kind = NodeKind::Confluence;
    std::string ref;         // reservoir / demand / inflow name; empty otherwise
    std::string downstream;  // empty only for the sink
};

struct Basin {
    std::vector<ReservoirSpec> reservoirs;
    std::vector<HydroPlantSpec> plants;
    std::vector<DemandSite> demands;
    std::vector<InflowModel> inflows;
    std::vector<TopologyNode> topology;

    /// Checks every component and the topology (single sink, one downstream link
    /// per node, acyclic, every reservoir/demand/inflow referenced exactly once).
    void validate() const;

    std::optional<std::size_t> reservoir_index(const std::string& name) const;
    std::optional<std::size_t> demand_index(const std::string& name) const;
    std::optional<std::size_t> inflow_index(const std::string& name) const;
    const HydroPlantSpec* plant_for(const std::string& reservoir) const;
};

/// Node indices of `basin.topology` such that every node precedes its
/// downstream node. Ties keep declaration order. Throws ConfigError on cycles.
std::vector<std::size_t> routing_order(const Basin& basin);

/// Topology resolved to indices, computed once per basin.
struct RoutingPlan {
    std::vector<std::size_t> order;
    std::vector<std::optional<std::size_t>> downstream;  // node index
    std::vector<std::size_t> ref;  // reservoir / demand / inflow index of each node
};

RoutingPlan make_routing_plan(const Basin& basin);

/// Per-month flows of one routing pass, indexed like the basin's vectors.
struct RoutingResult {
    std::vector<ReservoirState> storages;
    std::vector<double> reservoir_inflow;
    std::vector<double> release;
    std::vector<double> spill;
    std::vector<double> evap;
    std::vector<double> delivered;  // per demand site
    double source_inflow = 0.0;     // total water entering the basin
    double sink_outflow = 0.0;      // total water leaving through the sink
};

/// Routes one month through the basin in topological order. `requested_release`
/// holds one requested volume per reservoir; each is clamped by feasible_release
/// against the storage after this month's inflow. `source_volumes` holds one
/// volume per inflow model.
RoutingResult route_month(const Basin& basin, const RoutingPlan& plan,
                          const std::vector<ReservoirState>& storages,
                          const std::vector<double>& requested_release,
                          const std::vector<double>& source_volumes, int month);

/// Illustrative four-dam cascade: GERD -> Roseires -> Sennar -> Sudan demand ->
/// confluence with the White Nile and Atbara -> HAD -> Egypt demand -> sea.
/// Magnitudes are plausible but not calibrated.
Basin default_basin();

}  // namespace nile
