#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "nile/io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using testing::count_of;
using testing::slurp;
using testing::spit;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run nile_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = nile::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    CHECK(nile_cli({}).code == 2);
    CHECK(nile_cli({"frobnicate"}).code == 2);
    CHECK(nile_cli({"simulate"}).code == 2);  // --out missing
    CHECK(nile_cli({"optimize", "--seeds", "1,x", "--out", "/tmp/unused"}).code == 2);
    CHECK(nile_cli({"--help"}).code == 0);
}

TEST_CASE("simulate") {
    const auto dir = testing::scratch_dir("cli_sim");
    const auto a = nile_cli({"simulate", "--seed", "7", "--policy", "zero", "--out", (dir / "a").string()});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("objectives ED=") == 0);
    const auto traj = slurp(dir / "a" / "trajectory.csv");
    CHECK(count_of(traj, "\n") == 241);
    CHECK(fs::exists(dir / "a" / "objectives.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["seeds"] == nlohmann::json::array({7}));

    REQUIRE(nile_cli({"simulate", "--seed", "7", "--policy", "zero", "--out", (dir / "b").string()}).code == 0);
    CHECK(slurp(dir / "b" / "trajectory.csv") == traj);

    REQUIRE(nile_cli({"simulate", "--seed", "7", "--policy", "random", "--out", (dir / "r1").string()}).code == 0);
    REQUIRE(nile_cli({"simulate", "--seed", "7", "--policy", "random", "--out", (dir / "r2").string()}).code == 0);
    CHECK(slurp(dir / "r1" / "trajectory.csv") == slurp(dir / "r2" / "trajectory.csv"));
    CHECK(slurp(dir / "r1" / "trajectory.csv") != traj);
}

TEST_CASE("missing config leaves no output behind") {
    const auto dir = testing::scratch_dir("cli_missing");
    const auto r = nile_cli({"simulate", "--config", (dir / "none.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") == 0);
    CHECK_FALSE(fs::exists(dir / "o"));
}

TEST_CASE("config from the environment variable") {
    const auto dir = testing::scratch_dir("cli_env");
    spit(dir / "c.json", R"({"env": {"horizon": 12}})");
    ::setenv("NILE_MOMDP_CONFIG", (dir / "c.json").string().c_str(), 1);
    const auto r = nile_cli({"simulate", "--out", (dir / "o").string()});
    ::unsetenv("NILE_MOMDP_CONFIG");
    REQUIRE(r.code == 0);
    CHECK(count_of(slurp(dir / "o" / "trajectory.csv"), "\n") == 13);
}

TEST_CASE("optimize, then simulate an archived policy") {
    const auto dir = testing::scratch_dir("cli_opt");
    const auto out = (dir / "opt").string();
    const auto r = nile_cli({"optimize", "--nfe", "40", "--pop", "20", "--seeds", "1,2,3", "--out", out});
    REQUIRE(r.code == 0);
    for (int s : {1, 2, 3}) {
        CHECK(fs::exists(dir / "opt" / ("archive_seed" + std::to_string(s) + ".csv")));
        CHECK(fs::exists(dir / "opt" / ("genomes_seed" + std::to_string(s) + ".csv")));
        CHECK(count_of(slurp(dir / "opt" / ("convergence_seed" + std::to_string(s) + ".csv")), "\n") == 3);
    }
    const auto merged = nile::read_solution_set(dir / "opt" / "merged.csv").points;
    CHECK(merged == oracle::pareto(merged));

    const auto sim = nile_cli({"simulate", "--policy", (dir / "opt" / "genomes_seed1.csv").string(), "--policy-row",
                               "0", "--out", (dir / "sim").string()});
    CHECK(sim.code == 0);
    CHECK(nile_cli({"simulate", "--policy", (dir / "opt" / "genomes_seed1.csv").string(), "--policy-row", "9999",
                    "--out", (dir / "sim2").string()})
              .code == 2);

    CHECK(nile_cli({"optimize", "--nfe", "10", "--pop", "20", "--seeds", "1", "--out", out}).code == 2);
}

TEST_CASE("zero-generation optimize archives the filtered initial population") {
    const auto dir = testing::scratch_dir("cli_zero");
    REQUIRE(nile_cli({"optimize", "--nfe", "20", "--pop", "20", "--seeds", "4", "--out", dir.string()}).code == 0);
    CHECK(count_of(slurp(dir / "convergence_seed4.csv"), "\n") == 2);
    const auto archive = nile::read_solution_set(dir / "archive_seed4.csv").points;
    CHECK(archive == oracle::pareto(archive));
}

TEST_CASE("evaluate") {
    const auto dir = testing::scratch_dir("cli_eval");
    // boxes of volume 2.21e8 and 1.50e8 against the origin
    spit(dir / "base.csv", "obj_1,obj_2,obj_3,obj_4\n221,1000,1000,1\n");
    spit(dir / "other.csv", "obj_1,obj_2,obj_3,obj_4\n150,1000,1000,1\n");
    const auto r = nile_cli({"evaluate", "--sets", "EMODPS=" + (dir / "base.csv").string(), "--sets",
                             "GPI-LS=" + (dir / "other.csv").string(), "--baseline", "EMODPS", "--ref-point",
                             "0,0,0,0", "--out", (dir / "o").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("2.21E+08 (100%)") != std::string::npos);
    CHECK(r.out.find("1.50E+08 (68%)") != std::string::npos);
    CHECK(slurp(dir / "o" / "metrics.txt") == r.out);
    CHECK(slurp(dir / "o" / "metrics.csv").find("GPI-LS,150000000,68,1,0") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(dir / "o" / "manifest.json"));
    CHECK(manifest["parameters"]["resolved_ref_point"] == nlohmann::json::array({0, 0, 0, 0}));

    const auto self = nile_cli({"evaluate", "--sets", "A=" + (dir / "base.csv").string(), "--baseline", "A", "--out",
                                (dir / "s").string()});
    REQUIRE(self.code == 0);
    CHECK(self.out.find("(100%)") != std::string::npos);

    const auto zero = nile_cli({"evaluate", "--sets", "A=" + (dir / "base.csv").string(), "--sets",
                                "B=" + (dir / "other.csv").string(), "--baseline", "A", "--ref-point",
                                "200,0,0,0", "--out", (dir / "z").string()});
    REQUIRE(zero.code == 0);
    CHECK(slurp(dir / "z" / "metrics.csv").find("B,0,0,1,0") != std::string::npos);

    spit(dir / "three.csv", "obj_1,obj_2,obj_3\n1,2,3\n");
    CHECK(nile_cli({"evaluate", "--sets", "A=" + (dir / "base.csv").string(), "--sets",
                    "C=" + (dir / "three.csv").string(), "--baseline", "A", "--out", (dir / "m").string()})
              .code == 2);
    CHECK_FALSE(fs::exists(dir / "m"));
    CHECK(nile_cli({"evaluate", "--sets", "A=" + (dir / "base.csv").string(), "--baseline", "Q", "--out",
                    (dir / "q").string()})
              .code == 2);
}

TEST_CASE("plot") {
    const auto dir = testing::scratch_dir("cli_plot");
    spit(dir / "a.csv", "obj_ED,obj_SD,obj_HAD,obj_EH\n-0.1,-0.2,1,0.3\n-0.3,-0.1,0.5,0.4\n");
    spit(dir / "b.csv", "obj_ED,obj_SD,obj_HAD,obj_EH\n-0.5,-0.5,0,0.1\n");
    spit(dir / "e.csv", "obj_ED,obj_SD,obj_HAD,obj_EH\n");
    const std::vector<std::string> args = {"plot",
                                           "--sets", "A=" + (dir / "a.csv").string(),
                                           "--sets", "B=" + (dir / "b.csv").string(),
                                           "--sets", "E=" + (dir / "e.csv").string(),
                                           "--out", (dir / "o").string()};
    REQUIRE(nile_cli(args).code == 0);
    const auto svg = slurp(dir / "o" / "parallel_coordinates.svg");
    CHECK(count_of(svg, "<g class=\"panel\"") == 3);
    CHECK(count_of(svg, "<polyline") == 3);
    CHECK(count_of(svg, ">n = 0<") == 1);
    REQUIRE(nile_cli(args).code == 0);
    CHECK(slurp(dir / "o" / "parallel_coordinates.svg") == svg);

    REQUIRE(nile_cli({"plot", "--sets", "E=" + (dir / "e.csv").string(), "--out", (dir / "only_empty").string()})
                .code == 0);
    CHECK(nile_cli({"plot", "--sets", "X=" + (dir / "missing.csv").string(), "--out", (dir / "x").string()}).code ==
          2);
}

TEST_CASE("dump-config output loads back") {
    const auto dir = testing::scratch_dir("cli_dump");
    const auto r = nile_cli({"dump-config"});
    REQUIRE(r.code == 0);
    spit(dir / "c.json", r.out);
    REQUIRE(nile_cli({"simulate", "--config", (dir / "c.json").string(), "--seed", "3", "--out",
                      (dir / "a").string()})
                .code == 0);
    REQUIRE(nile_cli({"simulate", "--seed", "3", "--out", (dir / "b").string()}).code == 0);
    CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
}

}  // TEST_SUITE
