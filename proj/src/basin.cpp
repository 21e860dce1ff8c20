#include "nile/basin.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

namespace {

constexpr std::array<int, kMonthsPerYear> kDaysInMonth = {31, 28, 31, 30, 31, 30,
                                                          31, 31, 30, 31, 30, 31};

void check_month(int month) {
    if (month < 1 || month > kMonthsPerYear) {
        throw UsageError(fmt::format("month {} outside 1..12", month));
    }
}

}  // namespace

double seconds_in_month(int month) {
    check_month(month);
    return kDaysInMonth[static_cast<std::size_t>(month - 1)] * 86400.0;
}

int month_at(int start_month, std::size_t t) {
    check_month(start_month);
    return static_cast<int>((static_cast<std::size_t>(start_month - 1) + t) % kMonthsPerYear) + 1;
}

void ReservoirSpec::validate() const {
    if (!(capacity > dead_storage) || dead_storage < 0.0) {
        throw ConfigError(fmt::format("reservoir '{}': need capacity > dead_storage >= 0", name));
    }
    if (level_storage_table.size() < 2) {
        throw ConfigError(fmt::format("reservoir '{}': level-storage table needs at least 2 knots", name));
    }
    for (std::size_t i = 1; i < level_storage_table.size(); ++i) {
        const auto& a = level_storage_table[i - 1];
        const auto& b = level_storage_table[i];
        if (!(b.storage > a.storage && b.level > a.level && b.area > a.area)) {
            throw ConfigError(fmt::format(
                "reservoir '{}': level-storage table must be strictly increasing (knot {})", name, i));
        }
    }
    if (!(max_release > 0.0)) {
        throw ConfigError(fmt::format("reservoir '{}': max_release must be positive", name));
    }
    for (double e : evap_rate_by_month) {
        if (!(e >= 0.0)) {
            throw ConfigError(fmt::format("reservoir '{}': evaporation rates must be >= 0", name));
        }
    }
}

void HydroPlantSpec::validate() const {
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw ConfigError(fmt::format("plant '{}': efficiency must lie in (0, 1]", name));
    }
    if (!(installed_capacity > 0.0) || !(turbine_max_flow > 0.0)) {
        throw ConfigError(
            fmt::format("plant '{}': installed_capacity and turbine_max_flow must be positive", name));
    }
}

void DemandSite::validate() const {
    for (double d : monthly_demand) {
        if (!(d >= 0.0)) throw ConfigError(fmt::format("demand '{}': demands must be >= 0", name));
    }
}

LevelArea level_area_from_storage(const ReservoirSpec& spec, double storage) {
    const auto& table = spec.level_storage_table;
    if (table.size() < 2) {
        throw ConfigError(fmt::format("reservoir '{}': level-storage table needs at least 2 knots", spec.name));
    }
    if (storage <= table.front().storage) return {table.front().level, table.front().area};
    if (storage >= table.back().storage) return {table.back().level, table.back().area};

    auto hi = std::upper_bound(table.begin(), table.end(), storage,
                               [](double s, const LevelStorageKnot& k) { return s < k.storage; });
    auto lo = hi - 1;
    const double w = (storage - lo->storage) / (hi->storage - lo->storage);
    return {lo->level + w * (hi->level - lo->level), lo->area + w * (hi->area - lo->area)};
}

double feasible_release(const ReservoirSpec& spec, const ReservoirState& state, double requested,
                        double dt) {
    const double available = std::max(state.storage - spec.dead_storage, 0.0);
    return std::min({std::max(requested, 0.0), spec.max_release * dt, available});
}

ReservoirStepResult reservoir_step(const ReservoirSpec& spec, const ReservoirState& state,
                                   double inflow, double release, int month) {
    check_month(month);
    ReservoirStepResult out;
    const double before_evap = state.storage + inflow - release;
    const double area = level_area_from_storage(spec, before_evap).area;
    const double rate = spec.evap_rate_by_month[static_cast<std::size_t>(month - 1)];
    out.evap_loss = std::clamp(rate * area, 0.0, std::max(before_evap, 0.0));

    double storage = before_evap - out.evap_loss;
    if (storage > spec.capacity) {
        out.spill = storage - spec.capacity;
        storage = spec.capacity;
    }
    out.state.storage = std::max(storage, 0.0);
    out.outflow = release + out.spill;
    return out;
}

double hydropower_energy(const HydroPlantSpec& plant, double flow, double head, double dt) {
    const double turbined = std::clamp(flow, 0.0, plant.turbine_max_flow);
    const double power = std::min(plant.efficiency * kWaterDensity * kGravity * turbined *
                                      std::max(head, 0.0),
                                  plant.installed_capacity);
    return power * dt;
}

// ---------------------------------------------------------------------------

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Reservoir: return "reservoir";
        case NodeKind::Demand: return "demand";
        case NodeKind::Confluence: return "confluence";
        case NodeKind::Inflow: return "inflow";
        case NodeKind::Sink: return "sink";
    }
    return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
    for (auto k : {NodeKind::Reservoir, NodeKind::Demand, NodeKind::Confluence, NodeKind::Inflow,
                   NodeKind::Sink}) {
        if (s == to_string(k)) return k;
    }
    throw ConfigError(fmt::format("unknown topology node kind '{}'", s));
}

namespace {

template <typename T>
std::optional<std::size_t> find_by_name(const std::vector<T>& items, const std::string& name) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].name == name) return i;
    }
    return std::nullopt;
}

template <typename T>
void check_unique_names(const std::vector<T>& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.name).second) {
            throw ConfigError(fmt::format("duplicate {} name '{}'", what, item.name));
        }
    }
}

}  // namespace

std::optional<std::size_t> Basin::reservoir_index(const std::string& name) const {
    return find_by_name(reservoirs, name);
}
std::optional<std::size_t> Basin::demand_index(const std::string& name) const {
    return find_by_name(demands, name);
}
std::optional<std::size_t> Basin::inflow_index(const std::string& name) const {
    return find_by_name(inflows, name);
}

const HydroPlantSpec* Basin::plant_for(const std::string& reservoir) const {
    for (const auto& p : plants) {
        if (p.reservoir == reservoir) return &p;
    }
    return nullptr;
}

void Basin::validate() const {
    for (const auto& r : reservoirs) r.validate();
    for (const auto& d : demands) d.validate();
    for (const auto& q : inflows) q.validate();
    for (const auto& p : plants) {
        p.validate();
        if (!reservoir_index(p.reservoir)) {
            throw ConfigError(fmt::format("plant '{}' references unknown reservoir '{}'", p.name, p.reservoir));
        }
    }
    check_unique_names(reservoirs, "reservoir");
    check_unique_names(demands, "demand");
    check_unique_names(inflows, "inflow");

    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < topology.size(); ++i) {
        if (!ids.emplace(topology[i].id, i).second) {
            throw ConfigError(fmt::format("duplicate topology node id '{}'", topology[i].id));
        }
    }

    std::size_t sinks = 0;
    std::vector<int> uses_reservoir(reservoirs.size()), uses_demand(demands.size()),
        uses_inflow(inflows.size());
    for (const auto& node : topology) {
        if (node.kind == NodeKind::Sink) {
            ++sinks;
            if (!node.downstream.empty()) {
                throw ConfigError(fmt::format("sink '{}' must not have a downstream link", node.id));
            }
        } else {
            if (node.downstream.empty()) {
                throw ConfigError(fmt::format("node '{}' has no downstream link", node.id));
            }
            if (!ids.count(node.downstream)) {
                throw ConfigError(fmt::format("node '{}' links to unknown node '{}'", node.id, node.downstream));
            }
        }
        auto mark = [&](auto index, std::vector<int>& uses, const char* what) {
            if (!index) {
                throw ConfigError(fmt::format("node '{}' references unknown {} '{}'", node.id, what, node.ref));
            }
            ++uses[*index];
        };
        switch (node.kind) {
            case NodeKind::Reservoir: mark(reservoir_index(node.ref), uses_reservoir, "reservoir"); break;
            case NodeKind::Demand: mark(demand_index(node.ref), uses_demand, "demand"); break;
            case NodeKind::Inflow: mark(inflow_index(node.ref), uses_inflow, "inflow"); break;
            default: break;
        }
    }
    if (sinks != 1) throw ConfigError(fmt::format("topology needs exactly one sink, found {}", sinks));
    auto exactly_once = [](const std::vector<int>& uses, const char* what) {
        for (std::size_t i = 0; i < uses.size(); ++i) {
            if (uses[i] != 1) {
                throw ConfigError(fmt::format("{} #{} must appear exactly once in the topology", what, i));
            }
        }
    };
    exactly_once(uses_reservoir, "reservoir");
    exactly_once(uses_demand, "demand");
    exactly_once(uses_inflow, "inflow");

    routing_order(*this);  // throws on cycles
}

std::vector<std::size_t> routing_order(const Basin& basin) {
    const auto& nodes = basin.topology;
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) ids.emplace(nodes[i].id, i);

    std::vector<std::size_t> indegree(nodes.size(), 0);
    std::vector<std::optional<std::size_t>> down(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].downstream.empty()) continue;
        auto it = ids.find(nodes[i].downstream);
        if (it == ids.end()) {
            throw ConfigError(fmt::format("node '{}' links to unknown node '{}'", nodes[i].id, nodes[i].downstream));
        }
        down[i] = it->second;
        ++indegree[it->second];
    }

    // Kahn's algorithm; the ready set is ordered by declaration index.
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    order.reserve(nodes.size());
    while (!ready.empty()) {
        const std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        if (down[i] && --indegree[*down[i]] == 0) ready.insert(*down[i]);
    }
    if (order.size() != nodes.size()) throw ConfigError("topology contains a cycle");
    return order;
}

RoutingPlan make_routing_plan(const Basin& basin) {
    RoutingPlan plan;
    plan.order = routing_order(basin);
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < basin.topology.size(); ++i) ids.emplace(basin.topology[i].id, i);
    for (const auto& node : basin.topology) {
        plan.downstream.push_back(node.downstream.empty() ? std::nullopt
                                                          : std::optional<std::size_t>(ids.at(node.downstream)));
        std::optional<std::size_t> ref;
        switch (node.kind) {
            case NodeKind::Reservoir: ref = basin.reservoir_index(node.ref); break;
            case NodeKind::Demand: ref = basin.demand_index(node.ref); break;
            case NodeKind::Inflow: ref = basin.inflow_index(node.ref); break;
            default: ref = 0; break;
        }
        if (!ref) throw ConfigError(fmt::format("node '{}' references unknown '{}'", node.id, node.ref));
        plan.ref.push_back(*ref);
    }
    return plan;
}

RoutingResult route_month(const Basin& basin, const RoutingPlan& plan,
                          const std::vector<ReservoirState>& storages,
                          const std::vector<double>& requested_release,
                          const std::vector<double>& source_volumes, int month) {
    const std::size_t nr = basin.reservoirs.size();
    if (storages.size() != nr || requested_release.size() != nr) {
        throw UsageError("route_month: one storage and one release request per reservoir required");
    }
    if (source_volumes.size() != basin.inflows.size()) {
        throw UsageError("route_month: one source volume per inflow model required");
    }

    const double dt = seconds_in_month(month);
    RoutingResult out;
    out.storages = storages;
    out.reservoir_inflow.assign(nr, 0.0);
    out.release.assign(nr, 0.0);
    out.spill.assign(nr, 0.0);
    out.evap.assign(nr, 0.0);
    out.delivered.assign(basin.demands.size(), 0.0);

    if (plan.ref.size() != basin.topology.size()) throw UsageError("route_month: plan does not match basin");
    std::vector<double> arriving(basin.topology.size(), 0.0);

    for (std::size_t n : plan.order) {
        const auto& node = basin.topology[n];
        double leaving = arriving[n];
        switch (node.kind) {
            case NodeKind::Inflow: {
                const double v = source_volumes[plan.ref[n]];
                out.source_inflow += v;
                leaving += v;
                break;
            }
            case NodeKind::Reservoir: {
                const std::size_t r = plan.ref[n];
                const auto& spec = basin.reservoirs[r];
                const ReservoirState filled{storages[r].storage + leaving};
                const double release = feasible_release(spec, filled, requested_release[r], dt);
                const auto step = reservoir_step(spec, storages[r], leaving, release, month);
                out.reservoir_inflow[r] = leaving;
                out.release[r] = release;
                out.spill[r] = step.spill;
                out.evap[r] = step.evap_loss;
                out.storages[r] = step.state;
                leaving = step.outflow;
                break;
            }
            case NodeKind::Demand: {
                const std::size_t d = plan.ref[n];
                const double demand = basin.demands[d].monthly_demand[static_cast<std::size_t>(month - 1)];
                const double supply = std::min(leaving, demand);
                out.delivered[d] = supply;
                leaving -= supply;
                break;
            }
            case NodeKind::Sink:
                out.sink_outflow += leaving;
                leaving = 0.0;
                break;
            case NodeKind::Confluence:
                break;
        }
        if (plan.downstream[n]) arriving[*plan.downstream[n]] += leaving;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

MonthlyValues scaled(const MonthlyValues& v, double factor) {
    MonthlyValues out{};
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
    return out;
}

MonthlyValues constant(double x) {
    MonthlyValues out{};
    out.fill(x);
    return out;
}

}  // namespace

Basin default_basin() {
    Basin b;

    b.reservoirs.push_back({
        "GERD", 74.0e9, 14.8e9,
        {{0.0, 500.0, 0.0}, {14.8e9, 590.0, 8.0e8}, {40.0e9, 620.0, 1.3e9}, {74.0e9, 640.0, 1.874e9}},
        7000.0,
        {0.15, 0.15, 0.17, 0.16, 0.14, 0.10, 0.07, 0.07, 0.09, 0.12, 0.13, 0.14},
    });
    const MonthlyValues sudan_evap = {0.18, 0.20, 0.24, 0.25, 0.25, 0.22,
                                      0.18, 0.16, 0.18, 0.20, 0.19, 0.17};
    b.reservoirs.push_back({
        "Roseires", 7.4e9, 0.6e9,
        {{0.0, 440.0, 0.0}, {0.6e9, 467.0, 1.2e8}, {3.0e9, 481.0, 3.5e8}, {7.4e9, 493.0, 6.3e8}},
        9000.0, sudan_evap,
    });
    b.reservoirs.push_back({
        "Sennar", 0.93e9, 0.3e9,
        {{0.0, 405.0, 0.0}, {0.3e9, 414.0, 6.0e7}, {0.93e9, 421.7, 1.6e8}},
        9000.0, sudan_evap,
    });
    b.reservoirs.push_back({
        "HAD", 162.0e9, 31.6e9,
        {{0.0, 110.0, 0.0}, {31.6e9, 147.0, 2.0e9}, {60.0e9, 159.0, 3.0e9}, {120.0e9, 175.0, 5.0e9},
         {162.0e9, 182.0, 6.5e9}},
        4000.0,
        {0.13, 0.15, 0.20, 0.24, 0.28, 0.30, 0.30, 0.29, 0.26, 0.22, 0.17, 0.14},
    });

    b.plants.push_back({"GERD plant", "GERD", 0.9, 5150.0e6, 4500.0, 505.0});
    b.plants.push_back({"HAD plant", "HAD", 0.85, 2100.0e6, 1800.0, 110.0});

    b.demands.push_back({"Sudan", scaled({1.4, 1.2, 1.0, 0.8, 0.7, 0.8, 1.2, 1.5, 1.6, 1.6, 1.6, 1.5}, 1e9)});
    b.demands.push_back({"Egypt", scaled({3.5, 3.6, 4.3, 4.6, 5.4, 6.3, 6.6, 6.0, 4.5, 4.3, 3.6, 3.4}, 1e9)});

    b.inflows.push_back({"BlueNile",
                         {420, 300, 260, 240, 300, 720, 2900, 5400, 4300, 2150, 950, 560},
                         constant(0.25), InflowMode::StochasticLognormal, {}});
    b.inflows.push_back({"WhiteNile",
                         {900, 750, 650, 600, 600, 650, 700, 850, 1000, 1100, 1100, 1000},
                         constant(0.15), InflowMode::StochasticLognormal, {}});
    b.inflows.push_back({"Atbara",
                         {10, 5, 2, 1, 5, 60, 900, 2200, 1400, 300, 60, 20},
                         constant(0.35), InflowMode::StochasticLognormal, {}});

    b.topology = {
        {"blue_nile", NodeKind::Inflow, "BlueNile", "gerd"},
        {"gerd", NodeKind::Reservoir, "GERD", "roseires"},
        {"roseires", NodeKind::Reservoir, "Roseires", "sennar"},
        {"sennar", NodeKind::Reservoir, "Sennar", "sudan_irrigation"},
        {"sudan_irrigation", NodeKind::Demand, "Sudan", "khartoum"},
        {"white_nile", NodeKind::Inflow, "WhiteNile", "khartoum"},
        {"khartoum", NodeKind::Confluence, "", "atbara_junction"},
        {"atbara", NodeKind::Inflow, "Atbara", "atbara_junction"},
        {"atbara_junction", NodeKind::Confluence, "", "had"},
        {"had", NodeKind::Reservoir, "HAD", "egypt_irrigation"},
        {"egypt_irrigation", NodeKind::Demand, "Egypt", "sea"},
        {"sea", NodeKind::Sink, "", ""},
    };
    return b;
}

}  // namespace nile
