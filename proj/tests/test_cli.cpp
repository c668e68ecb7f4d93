#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glpm/experiments.hpp"
#include "glpm/snapshot.hpp"

using namespace glpm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("glpm_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("config parsing, defaults and validation") {
    const auto j = nlohmann::json::parse(R"({
        "experiment": "density-2d",
        "name": "planar",
        "seed": 42,
        "params": {"n": 2, "p": 2.0, "m": 4.0, "Lambda": 16.0},
        "grid": {"box": [24, 24], "h": 0.25},
        "audit": {"T": 3, "R0": 4, "R_list": [7, 9]}
    })");
    RunConfig cfg = RunConfig::from_json(j);
    CHECK(cfg.params.m == 4.0);
    CHECK(cfg.T == 3);
    CHECK(cfg.bc[0].dirichlet); // default two-phase data across axis 0
    CHECK_FALSE(cfg.bc[1].dirichlet);
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("slow-decay regime is required for the density pipeline") {
        RunConfig bad = cfg;
        bad.params.m = 1.5;
        try {
            bad.validate();
            FAIL("expected validation failure");
        } catch (const validation_error& e) {
            CHECK(std::string(e.what()).find("m > p") != std::string::npos);
        }
    }
    SUBCASE("unknown experiment rejected") {
        RunConfig bad = cfg;
        bad.experiment = "nope";
        CHECK_THROWS_AS(bad.validate(), validation_error);
    }
    SUBCASE("potential m must agree with params") {
        auto jj = j;
        jj["potential"] = {{"kind", "model"}, {"m", 3.0}};
        CHECK_THROWS_AS(RunConfig::from_json(jj), validation_error);
    }
}

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a, b;
    CHECK(a.config_hash() == b.config_hash());
    b.seed = 1;
    CHECK(a.config_hash() != b.config_hash());
    b = a;
    b.params.m = 3.5;
    CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("bc string parser") {
    const auto bc = parse_bc_string("x:dirichlet:-1,1;y:natural");
    CHECK(bc[0].dirichlet);
    CHECK(bc[0].lo == -1.0);
    CHECK(bc[0].hi == 1.0);
    CHECK_FALSE(bc[1].dirichlet);
    CHECK_THROWS_AS(parse_bc_string("w:dirichlet:0,1"), validation_error);
    CHECK_THROWS_AS(parse_bc_string("x:pinned:0,1"), validation_error);
}

TEST_CASE("snapshot round trip is bit exact") {
    const auto dir = temp_dir("snapshot");
    const Grid g = Grid::box(2, {8, 6, 0}, 0.5);
    const Field u = Field::from_function(
        g, [](std::array<double, 3> x) { return std::tanh(x[0]) * std::cos(x[1]); });
    save_snapshot(u, (dir / "field").string(), {{"p", 2.0}, {"m", 4.0}});
    auto [v, header] = load_snapshot((dir / "field").string());
    CHECK(v.grid.same_as(g));
    REQUIRE(v.values.size() == u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(v.values[i] == u.values[i]);
    CHECK(header["params"]["m"] == 4.0);
    // CSV slice export
    export_field_csv(u, (dir / "field.csv").string());
    const std::string csv = slurp(dir / "field.csv");
    CHECK(csv.rfind("x,y,u", 0) == 0);
}

TEST_CASE("tail-scaling pipeline artifacts and report") {
    const auto dir = temp_dir("tails");
    RunConfig cfg;
    cfg.experiment = "profile-tails";
    cfg.params.n = 1;
    cfg.params.p = 2.0;
    cfg.params.m = 4.0;
    cfg.params.Lambda = 16.0;
    cfg.tail_samples = 7;
    cfg.out_dir = (dir / "run").string();
    const auto rep = run_experiment(cfg);
    CHECK(std::abs(rep["tail_slope"].get<double>() + 3.0) / 3.0 <= 0.10);
    CHECK(rep["decay_exponent"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fs::exists(dir / "run" / "report.json"));
    CHECK(fs::exists(dir / "run" / "tails.csv"));
    CHECK(fs::exists(dir / "run" / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
    CHECK(manifest["config_hash"] == cfg.config_hash());
    CHECK(manifest["artifacts"].size() >= 2);
}

TEST_CASE("classical pipeline reruns byte-identically") {
    const auto dir = temp_dir("classical");
    RunConfig cfg;
    cfg.experiment = "classical-1d";
    cfg.params.n = 1;
    cfg.params.p = 2.0;
    cfg.params.m = 2.0;
    cfg.box = {24.0, 0.0, 0.0};
    cfg.h = 0.1;
    cfg.tol = 1e-7;
    cfg.seed = 7;

    cfg.out_dir = (dir / "a").string();
    run_experiment(cfg);
    cfg.out_dir = (dir / "b").string();
    run_experiment(cfg);
    // out_dir participates in the config, so compare the measured payloads
    auto ja = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    auto jb = nlohmann::json::parse(slurp(dir / "b" / "report.json"));
    ja.erase("config_hash");
    jb.erase("config_hash");
    CHECK(ja.dump() == jb.dump());
    CHECK(ja["sup_error_vs_tanh"].get<double>() <= 0.05);
    CHECK(slurp(dir / "a" / "field.f64") == slurp(dir / "b" / "field.f64"));
}

TEST_CASE("sweep aggregates per-value scalars") {
    const auto dir = temp_dir("sweep");
    RunConfig cfg;
    cfg.experiment = "profile-tails";
    cfg.params.n = 1;
    cfg.params.p = 2.0;
    cfg.params.m = 4.0;
    cfg.params.Lambda = 64.0;
    cfg.tail_samples = 5;
    cfg.out_dir = (dir / "sw").string();

    const auto rep = sweep_experiment(cfg, "m", {3.0, 4.0, 6.0}, 2);
    REQUIRE(rep["rows"].size() == 3);
    // gamma = pm/(m-p) - 1 at p = 2: {5, 3, 2}
    const double expect[3] = {5.0, 3.0, 2.0};
    for (int k = 0; k < 3; ++k) {
        CHECK(rep["rows"][k]["status"] == "ok");
        CHECK(std::abs(rep["rows"][k]["tail_slope"].get<double>() + expect[k]) / expect[k] <=
              0.10);
        CHECK(rep["rows"][k]["gamma"].get<double>() == doctest::Approx(expect[k]).epsilon(1e-12));
    }
    CHECK(fs::exists(dir / "sw" / "sweep.csv"));

    SUBCASE("empty value list is a validation error") {
        CHECK_THROWS_AS(sweep_experiment(cfg, "m", {}, 1), validation_error);
    }
    SUBCASE("unknown axis is a validation error") {
        CHECK_THROWS_AS(sweep_experiment(cfg, "zeta", {1.0}, 1), validation_error);
    }
}

TEST_CASE("command line binary exit codes") {
    // the test binary runs from the build directory where glpm sits
    if (!fs::exists("glpm")) return; // skip when invoked from elsewhere
    const auto dir = temp_dir("cli");

    SUBCASE("recursion trace and summary") {
        const std::string cmd = "./glpm simulate-induction --n 2 --sigma 0.1 --T 10 --C0 1 "
                                "--c1 1 --gamma 3 --R 800 --Rstop 900 --quiet --out " +
                                (dir / "trace.csv").string();
        CHECK(std::system(cmd.c_str()) == 0);
        CHECK(fs::exists(dir / "trace.csv"));
    }
    SUBCASE("validation failures exit with code 1") {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"experiment": "density-2d", "params": {"n": 2, "p": 2.0, "m": 1.5}})";
        cfg.close();
        const std::string cmd =
            "./glpm run --config " + (dir / "bad.json").string() + " --quiet 2>" +
            (dir / "err.txt").string();
        const int rc = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(rc) == 1);
        const std::string err = slurp(dir / "err.txt");
        CHECK(err.find("m > p") != std::string::npos);
    }
    SUBCASE("profile subcommand emits CSV plus metadata sidecar") {
        const std::string prefix = (dir / "prof").string();
        const std::string cmd =
            "./glpm profile --kind comparison --p 2 --m 4 --t-min -50 --t-max 2 "
            "--samples 64 --quiet --out " + prefix;
        CHECK(std::system(cmd.c_str()) == 0);
        CHECK(fs::exists(prefix + ".csv"));
        CHECK(fs::exists(prefix + ".meta.json"));
        const auto meta = nlohmann::json::parse(slurp(prefix + ".meta.json"));
        CHECK(meta["p"] == 2.0);
    }
}
