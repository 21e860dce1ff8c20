#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nile/config.hpp"
#include "nile/emodps.hpp"
#include "nile/error.hpp"
#include "nile/io.hpp"
#include "nile/report.hpp"

namespace nile::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct LoadedConfig {
    RunConfig config;
    std::string source;  // path, or "built-in default"
};

LoadedConfig load(const std::optional<std::string>& explicit_path) {
    const auto path = resolve_config_path(explicit_path);
    if (!path) return {RunConfig{}, "built-in default"};
    if (!fs::exists(*path)) throw ConfigError(fmt::format("config file '{}' does not exist", path->string()));
    RunConfig cfg = load_config(*path);
    return {std::move(cfg), path->string()};
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config_source,
                    const std::vector<std::uint64_t>& seeds, const json& parameters) {
    json manifest = {{"command", command},
                     {"config", config_source},
                     {"seeds", seeds},
                     {"output_directory", dir.string()},
                     {"parameters", parameters}};
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

struct NamedPath {
    std::string name;
    fs::path path;
};

std::vector<NamedPath> parse_named_sets(const std::vector<std::string>& specs) {
    std::vector<NamedPath> out;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
            throw UsageError(fmt::format("--sets expects name=path, got '{}'", s));
        }
        for (const auto& prev : out) {
            if (prev.name == s.substr(0, eq)) throw UsageError(fmt::format("set name '{}' given twice", prev.name));
        }
        out.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
    return out;
}

struct LoadedSets {
    std::vector<std::string> names;
    std::vector<SolutionSet> filtered;
    std::vector<std::string> columns;
};

LoadedSets load_sets(const std::vector<NamedPath>& specs) {
    LoadedSets out;
    std::optional<std::size_t> dim;
    for (const auto& s : specs) {
        LabeledSet set = read_solution_set(s.path);
        if (dim && *dim != set.columns.size()) {
            throw ConfigError(fmt::format("set '{}' has {} objectives, earlier sets have {}", s.name,
                                          set.columns.size(), *dim));
        }
        dim = set.columns.size();
        if (out.columns.empty()) out.columns = set.columns;
        out.names.push_back(s.name);
        out.filtered.push_back(pareto_filter(set.points));
    }
    return out;
}

std::vector<std::string> axis_labels(const std::vector<std::string>& columns) {
    std::vector<std::string> labels;
    for (const auto& c : columns) labels.push_back(c.rfind("obj_", 0) == 0 ? c.substr(4) : c);
    return labels;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::optional<std::string> config;
    std::uint64_t seed = 0;
    std::string policy = "zero";
    std::size_t policy_row = 0;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const LoadedConfig loaded = load(a.config);
    const EnvConfig& env = loaded.config.env;

    Policy policy;
    std::string policy_desc = a.policy;
    if (a.policy == "zero") {
        policy = [](const Observation&) { return Action{}; };
    } else if (a.policy == "random") {
        auto rng = std::make_shared<std::mt19937_64>(a.seed ^ 0x9e3779b97f4a7c15ULL);
        policy = [rng](const Observation&) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            Action act{};
            for (double& x : act) x = u(*rng);
            return act;
        };
    } else {
        const auto genomes = read_genomes(a.policy);
        if (a.policy_row >= genomes.size()) {
            throw UsageError(fmt::format("--policy-row {} out of range ({} genomes in '{}')", a.policy_row,
                                         genomes.size(), a.policy));
        }
        const Genome& g = genomes[a.policy_row];
        const std::size_t n_rbf = loaded.config.emodps.n_rbf;
        if (g.size() != genome_length(n_rbf)) {
            throw ConfigError(fmt::format("genome has {} genes; n_rbf = {} needs {}", g.size(), n_rbf,
                                          genome_length(n_rbf)));
        }
        auto rbf = std::make_shared<RbfPolicy>(decode_genome(g, n_rbf));
        policy = [rbf](const Observation& obs) { return policy_act(*rbf, obs); };
        policy_desc = fmt::format("rbf:{}#{}", a.policy, a.policy_row);
    }

    const RolloutResult result = rollout(env, policy, a.seed, true);
    std::ostringstream traj;
    write_trajectory_csv(traj, result.trajectory);
    const SolutionSet objectives = {Point(result.objectives.begin(), result.objectives.end())};

    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_file_atomic(dir / "trajectory.csv", traj.str());
    write_file_atomic(dir / "objectives.csv", solution_set_csv(objectives));
    write_manifest(dir, "simulate", loaded.source, {a.seed},
                   {{"policy", policy_desc}, {"horizon", env.horizon}, {"stochastic", env.stochastic}});

    out << fmt::format("objectives ED={} SD={} HAD={} EH={}\n", result.objectives[0], result.objectives[1],
                       result.objectives[2], result.objectives[3]);
    return kExitOk;
}

struct OptimizeArgs {
    std::optional<std::string> config;
    std::optional<std::size_t> nfe;
    std::optional<std::size_t> pop;
    std::vector<std::uint64_t> seeds;
    std::size_t threads = 1;
    std::string out;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
    LoadedConfig loaded = load(a.config);
    MoeaConfig moea = loaded.config.emodps;
    if (a.nfe) moea.nfe_budget = *a.nfe;
    if (a.pop) moea.population_size = *a.pop;
    moea.validate();
    if (a.seeds.empty()) throw UsageError("--seeds needs at least one seed");

    struct SeedRun {
        std::uint64_t seed;
        EmodpsResult result;
    };
    std::vector<SeedRun> runs;
    std::vector<SolutionSet> archives;
    for (std::uint64_t seed : a.seeds) {
        MoeaConfig cfg = moea;
        cfg.seed = seed;
        runs.push_back({seed, run_emodps(loaded.config.env, cfg, a.threads)});
        archives.push_back(runs.back().result.archive.objectives());
        out << fmt::format("seed {}: {} evaluations, archive size {}, hypervolume {}\n", seed, runs.back().result.nfe,
                           runs.back().result.archive.size(), runs.back().result.convergence.back().hypervolume);
    }
    const SolutionSet merged = merge_and_filter(archives);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    for (const auto& r : runs) {
        std::vector<Genome> genomes;
        for (const auto& e : r.result.archive.entries()) genomes.push_back(e.genome);
        write_file_atomic(dir / fmt::format("archive_seed{}.csv", r.seed),
                          solution_set_csv(r.result.archive.objectives()));
        write_file_atomic(dir / fmt::format("genomes_seed{}.csv", r.seed), genomes_csv(genomes));
        write_file_atomic(dir / fmt::format("convergence_seed{}.csv", r.seed), convergence_csv(r.result.convergence));
    }
    write_file_atomic(dir / "merged.csv", solution_set_csv(merged));
    write_manifest(dir, "optimize", loaded.source, a.seeds,
                   {{"nfe", moea.nfe_budget},
                    {"pop", moea.population_size},
                    {"n_rbf", moea.n_rbf},
                    {"eval_seed", loaded.config.env.seed},
                    {"hv_reference", moea.hv_reference}});
    out << fmt::format("merged set: {} solutions\n", merged.size());
    return kExitOk;
}

struct EvaluateArgs {
    std::vector<std::string> sets;
    std::string baseline;
    std::string ref_point = "auto";
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const auto specs = parse_named_sets(a.sets);
    const LoadedSets sets = load_sets(specs);
    if (std::find(sets.names.begin(), sets.names.end(), a.baseline) == sets.names.end()) {
        throw UsageError(fmt::format("baseline '{}' is not one of the named sets", a.baseline));
    }
    Point ref;
    if (a.ref_point == "auto") {
        ref = default_reference_point(sets.filtered);
    } else {
        ref = parse_number_list(a.ref_point);
        if (ref.size() != sets.columns.size()) {
            throw UsageError(fmt::format("--ref-point has {} values, sets have {} objectives", ref.size(),
                                         sets.columns.size()));
        }
    }
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < sets.names.size(); ++i) rows.push_back(evaluate_set(sets.names[i], sets.filtered[i], ref));
    const MetricsReport report = baseline_percentages(std::move(rows), a.baseline, ref);
    const std::string table = metrics_table_render(report);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_file_atomic(dir / "metrics.csv", metrics_csv(report));
    write_file_atomic(dir / "metrics.txt", table);
    json named;
    for (const auto& s : specs) named[s.name] = s.path.string();
    write_manifest(dir, "evaluate", "none", {},
                   {{"sets", named}, {"baseline", a.baseline}, {"ref_point", a.ref_point}, {"resolved_ref_point", ref}});
    out << table;
    return kExitOk;
}

struct PlotArgs {
    std::vector<std::string> sets;
    std::string out;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    const auto specs = parse_named_sets(a.sets);
    const LoadedSets sets = load_sets(specs);

    bool any = false;
    for (const auto& s : sets.filtered) any = any || !s.empty();
    std::vector<NormalizedSet> normalized;
    if (any) {
        normalized = normalize_sets(sets.filtered);
    } else {
        normalized.assign(sets.filtered.size(), NormalizedSet{});
    }
    std::vector<NamedSet> named;
    for (std::size_t i = 0; i < sets.names.size(); ++i) named.emplace_back(sets.names[i], normalized[i]);
    const std::string svg = parallel_coordinates_svg(named, axis_labels(sets.columns));

    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_file_atomic(dir / "parallel_coordinates.svg", svg);
    json paths;
    for (const auto& s : specs) paths[s.name] = s.path.string();
    write_manifest(dir, "plot", "none", {}, {{"sets", paths}});
    for (std::size_t i = 0; i < sets.names.size(); ++i) {
        out << fmt::format("{}: {} solutions\n", sets.names[i], sets.filtered[i].size());
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nile basin multi-objective simulation, policy search and solution-set evaluation", "nile"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one episode and write its trajectory");
    simulate->add_option("--config", sim.config, "Config document (falls back to $NILE_MOMDP_CONFIG)");
    simulate->add_option("--seed", sim.seed, "Episode seed");
    simulate->add_option("--policy", sim.policy, "zero, random, or a genome CSV written by optimize");
    simulate->add_option("--policy-row", sim.policy_row, "Row of the genome CSV to use");
    simulate->add_option("--out", sim.out, "Output directory")->required();

    OptimizeArgs opt;
    std::string seeds_text;
    auto* optimize = app.add_subcommand("optimize", "Run EMODPS once per seed and merge the archives");
    optimize->add_option("--config", opt.config, "Config document (falls back to $NILE_MOMDP_CONFIG)");
    optimize->add_option("--nfe", opt.nfe, "Evaluation budget per seed");
    optimize->add_option("--pop", opt.pop, "Population size");
    optimize->add_option("--seeds", seeds_text, "Comma-separated optimizer seeds")->required();
    optimize->add_option("--threads", opt.threads, "Parallel rollouts per generation")->check(CLI::PositiveNumber);
    optimize->add_option("--out", opt.out, "Output directory")->required();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Hypervolume, cardinality and sparsity of solution sets");
    evaluate->add_option("--sets", ev.sets, "name=path solution-set CSVs")->required();
    evaluate->add_option("--baseline", ev.baseline, "Name of the baseline set")->required();
    evaluate->add_option("--ref-point", ev.ref_point, "auto or comma-separated lower bounds");
    evaluate->add_option("--out", ev.out, "Output directory")->required();

    PlotArgs pl;
    auto* plot = app.add_subcommand("plot", "Parallel-coordinates SVG of solution sets");
    plot->add_option("--sets", pl.sets, "name=path solution-set CSVs")->required();
    plot->add_option("--out", pl.out, "Output directory")->required();

    std::optional<std::string> dump_path;
    auto* dump = app.add_subcommand("dump-config", "Print the built-in default configuration");
    dump->add_option("--out", dump_path, "Write to this file instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*optimize) {
            std::istringstream list(seeds_text);
            for (std::string field; std::getline(list, field, ',');) {
                std::size_t used = 0;
                try {
                    if (field.empty() || field[0] == '-') throw std::invalid_argument(field);
                    opt.seeds.push_back(std::stoull(field, &used));
                } catch (const std::logic_error&) {
                    used = 0;
                }
                if (used == 0 || used != field.size()) {
                    throw UsageError(fmt::format("seed '{}' is not a non-negative integer", field));
                }
            }
            return cmd_optimize(opt, out);
        }
        if (*evaluate) return cmd_evaluate(ev, out);
        if (*plot) return cmd_plot(pl, out);
        if (*dump) {
            const std::string doc = config_to_json(RunConfig{}).dump(2) + "\n";
            if (dump_path) {
                write_file_atomic(*dump_path, doc);
            } else {
                out << doc;
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace nile::cli
