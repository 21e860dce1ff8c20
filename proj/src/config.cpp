#include "nile/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

template <typename T>
T get(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) throw ConfigError(fmt::format("{}: missing key '{}'", where, key));
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: bad value for '{}': {}", where, key, e.what()));
    }
}

template <typename T>
void maybe(const json& obj, const char* key, T& target, const char* where) {
    if (obj.contains(key)) target = get<T>(obj, key, where);
}

MonthlyValues monthly(const json& obj, const char* key, const char* where) {
    const auto v = get<std::vector<double>>(obj, key, where);
    if (v.size() != kMonthsPerYear) {
        throw ConfigError(fmt::format("{}: '{}' needs exactly 12 values, got {}", where, key, v.size()));
    }
    MonthlyValues out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

const char* mode_name(InflowMode m) {
    return m == InflowMode::DeterministicTrace ? "deterministic-trace" : "stochastic-lognormal";
}

ReservoirSpec parse_reservoir(const json& j) {
    constexpr const char* w = "basin.reservoirs[]";
    check_keys(j, w, {"name", "capacity", "dead_storage", "level_storage_table", "max_release", "evap_rate_by_month"});
    ReservoirSpec r;
    r.name = get<std::string>(j, "name", w);
    r.capacity = get<double>(j, "capacity", w);
    r.dead_storage = get<double>(j, "dead_storage", w);
    for (const auto& row : get<std::vector<std::vector<double>>>(j, "level_storage_table", w)) {
        if (row.size() != 3) throw ConfigError(fmt::format("{}: table rows are [storage, level, area]", w));
        r.level_storage_table.push_back({row[0], row[1], row[2]});
    }
    r.max_release = get<double>(j, "max_release", w);
    r.evap_rate_by_month = monthly(j, "evap_rate_by_month", w);
    return r;
}

HydroPlantSpec parse_plant(const json& j) {
    constexpr const char* w = "basin.plants[]";
    check_keys(j, w, {"name", "reservoir", "efficiency", "installed_capacity", "turbine_max_flow", "tailwater_level"});
    HydroPlantSpec p;
    p.name = get<std::string>(j, "name", w);
    p.reservoir = get<std::string>(j, "reservoir", w);
    p.efficiency = get<double>(j, "efficiency", w);
    p.installed_capacity = get<double>(j, "installed_capacity", w);
    p.turbine_max_flow = get<double>(j, "turbine_max_flow", w);
    p.tailwater_level = get<double>(j, "tailwater_level", w);
    return p;
}

DemandSite parse_demand(const json& j) {
    constexpr const char* w = "basin.demands[]";
    check_keys(j, w, {"name", "monthly_demand"});
    return {get<std::string>(j, "name", w), monthly(j, "monthly_demand", w)};
}

InflowModel parse_inflow(const json& j, const std::filesystem::path& base_dir) {
    constexpr const char* w = "basin.inflows[]";
    check_keys(j, w, {"name", "monthly_mean", "monthly_cv", "mode", "trace", "trace_file"});
    InflowModel q;
    q.name = get<std::string>(j, "name", w);
    q.monthly_mean = monthly(j, "monthly_mean", w);
    if (j.contains("monthly_cv")) q.monthly_cv = monthly(j, "monthly_cv", w);
    const std::string mode = j.contains("mode") ? get<std::string>(j, "mode", w) : "stochastic-lognormal";
    if (mode == "deterministic-trace") {
        q.mode = InflowMode::DeterministicTrace;
    } else if (mode == "stochastic-lognormal") {
        q.mode = InflowMode::StochasticLognormal;
    } else {
        throw ConfigError(fmt::format("{}: unknown mode '{}'", w, mode));
    }
    if (j.contains("trace") && j.contains("trace_file")) {
        throw ConfigError(fmt::format("{}: give either 'trace' or 'trace_file', not both", w));
    }
    maybe(j, "trace", q.trace, w);
    if (j.contains("trace_file")) {
        std::filesystem::path p = get<std::string>(j, "trace_file", w);
        if (p.is_relative()) p = base_dir / p;
        q.trace = read_inflow_trace(p.string());
    }
    return q;
}

TopologyNode parse_node(const json& j) {
    constexpr const char* w = "basin.topology[]";
    check_keys(j, w, {"id", "kind", "ref", "downstream"});
    TopologyNode n;
    n.id = get<std::string>(j, "id", w);
    n.kind = node_kind_from_string(get<std::string>(j, "kind", w));
    maybe(j, "ref", n.ref, w);
    maybe(j, "downstream", n.downstream, w);
    return n;
}

template <typename T, typename F>
void parse_array(const json& basin, const char* key, std::vector<T>& out, F&& parse) {
    if (!basin.contains(key)) return;
    if (!basin[key].is_array()) throw ConfigError(fmt::format("basin.{} must be an array", key));
    out.clear();
    for (const auto& item : basin[key]) out.push_back(parse(item));
}

json monthly_json(const MonthlyValues& v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc, "config", {"basin", "env", "emodps"});
    RunConfig cfg;

    if (doc.contains("basin")) {
        const json& b = doc["basin"];
        check_keys(b, "basin", {"reservoirs", "plants", "demands", "inflows", "topology"});
        parse_array(b, "reservoirs", cfg.env.basin.reservoirs, parse_reservoir);
        parse_array(b, "plants", cfg.env.basin.plants, parse_plant);
        parse_array(b, "demands", cfg.env.basin.demands, parse_demand);
        parse_array(b, "inflows", cfg.env.basin.inflows, [&](const json& j) { return parse_inflow(j, base_dir); });
        parse_array(b, "topology", cfg.env.basin.topology, parse_node);
    }

    if (doc.contains("env")) {
        const json& e = doc["env"];
        constexpr const char* w = "env";
        check_keys(e, w, {"horizon", "gamma", "initial_storages", "min_power_level_had", "deficit_power", "stochastic",
                          "seed", "start_month", "power_reservoir", "level_reservoir", "egypt_demand",
                          "sudan_demand"});
        maybe(e, "horizon", cfg.env.horizon, w);
        maybe(e, "gamma", cfg.env.gamma, w);
        maybe(e, "initial_storages", cfg.env.initial_storages, w);
        maybe(e, "min_power_level_had", cfg.env.min_power_level_had, w);
        maybe(e, "deficit_power", cfg.env.deficit_power, w);
        maybe(e, "stochastic", cfg.env.stochastic, w);
        maybe(e, "seed", cfg.env.seed, w);
        maybe(e, "start_month", cfg.env.start_month, w);
        maybe(e, "power_reservoir", cfg.env.power_reservoir, w);
        maybe(e, "level_reservoir", cfg.env.level_reservoir, w);
        maybe(e, "egypt_demand", cfg.env.egypt_demand, w);
        maybe(e, "sudan_demand", cfg.env.sudan_demand, w);
    }

    if (doc.contains("emodps")) {
        const json& m = doc["emodps"];
        constexpr const char* w = "emodps";
        check_keys(m, w, {"n_rbf", "pop", "nfe", "eta_c", "eta_m", "crossover_rate", "mutation_rate", "seed",
                          "resample_inflows", "hv_reference"});
        maybe(m, "n_rbf", cfg.emodps.n_rbf, w);
        maybe(m, "pop", cfg.emodps.population_size, w);
        maybe(m, "nfe", cfg.emodps.nfe_budget, w);
        maybe(m, "eta_c", cfg.emodps.eta_c, w);
        maybe(m, "eta_m", cfg.emodps.eta_m, w);
        maybe(m, "crossover_rate", cfg.emodps.crossover_rate, w);
        if (m.contains("mutation_rate") && !m["mutation_rate"].is_null()) {
            cfg.emodps.mutation_rate = get<double>(m, "mutation_rate", w);
        }
        maybe(m, "seed", cfg.emodps.seed, w);
        maybe(m, "resample_inflows", cfg.emodps.resample_inflows, w);
        maybe(m, "hv_reference", cfg.emodps.hv_reference, w);
    }

    cfg.env.validate();
    cfg.emodps.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return config_from_json(doc, path.parent_path());
}

json config_to_json(const RunConfig& cfg) {
    const Basin& b = cfg.env.basin;
    json basin;
    for (const auto& r : b.reservoirs) {
        json table = json::array();
        for (const auto& k : r.level_storage_table) table.push_back({k.storage, k.level, k.area});
        basin["reservoirs"].push_back({{"name", r.name},
                                       {"capacity", r.capacity},
                                       {"dead_storage", r.dead_storage},
                                       {"level_storage_table", table},
                                       {"max_release", r.max_release},
                                       {"evap_rate_by_month", monthly_json(r.evap_rate_by_month)}});
    }
    for (const auto& p : b.plants) {
        basin["plants"].push_back({{"name", p.name},
                                   {"reservoir", p.reservoir},
                                   {"efficiency", p.efficiency},
                                   {"installed_capacity", p.installed_capacity},
                                   {"turbine_max_flow", p.turbine_max_flow},
                                   {"tailwater_level", p.tailwater_level}});
    }
    for (const auto& d : b.demands) {
        basin["demands"].push_back({{"name", d.name}, {"monthly_demand", monthly_json(d.monthly_demand)}});
    }
    for (const auto& q : b.inflows) {
        json j = {{"name", q.name},
                  {"monthly_mean", monthly_json(q.monthly_mean)},
                  {"monthly_cv", monthly_json(q.monthly_cv)},
                  {"mode", mode_name(q.mode)}};
        if (!q.trace.empty()) j["trace"] = q.trace;
        basin["inflows"].push_back(j);
    }
    for (const auto& n : b.topology) {
        json j = {{"id", n.id}, {"kind", to_string(n.kind)}};
        if (!n.ref.empty()) j["ref"] = n.ref;
        if (!n.downstream.empty()) j["downstream"] = n.downstream;
        basin["topology"].push_back(j);
    }

    const EnvConfig& e = cfg.env;
    json env = {{"horizon", e.horizon},
                {"gamma", e.gamma},
                {"initial_storages", e.initial_storages},
                {"min_power_level_had", e.min_power_level_had},
                {"deficit_power", e.deficit_power},
                {"stochastic", e.stochastic},
                {"seed", e.seed},
                {"start_month", e.start_month},
                {"power_reservoir", e.power_reservoir},
                {"level_reservoir", e.level_reservoir},
                {"egypt_demand", e.egypt_demand},
                {"sudan_demand", e.sudan_demand}};

    const MoeaConfig& m = cfg.emodps;
    json emodps = {{"n_rbf", m.n_rbf},
                   {"pop", m.population_size},
                   {"nfe", m.nfe_budget},
                   {"eta_c", m.eta_c},
                   {"eta_m", m.eta_m},
                   {"crossover_rate", m.crossover_rate},
                   {"mutation_rate", m.mutation_rate ? json(*m.mutation_rate) : json(nullptr)},
                   {"seed", m.seed},
                   {"resample_inflows", m.resample_inflows},
                   {"hv_reference", m.hv_reference}};

    return {{"basin", basin}, {"env", env}, {"emodps", emodps}};
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& explicit_path) {
    if (explicit_path && !explicit_path->empty()) return std::filesystem::path(*explicit_path);
    if (const char* env = std::getenv("NILE_MOMDP_CONFIG"); env && *env) return std::filesystem::path(env);
    return std::nullopt;
}

}  // namespace nile
