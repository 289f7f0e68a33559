#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const fs::path base = fs::temp_directory_path() / "bhpc_cli_io";
    fs::create_directories(base);
    const fs::path out = base / "out.txt", err = base / "err.txt";
    const std::string cmd =
        std::string(BHPC_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST_CASE("help exits 0 and lists the subcommands") {
    CliResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    for (const char* cmd : {"run", "thermal-state", "lindblad", "plot", "relax", "sweep"})
        CHECK(r.out.find(cmd) != std::string::npos);
}

TEST_CASE("thermal-state solves the reference chemical potential") {
    CliResult r = run_cli("thermal-state --beta 2 --n-bar 1 -m 20 --occupations");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc.at("mu").get<double>() == doctest::Approx(-1.0669371970969679).epsilon(1e-10));
    CHECK(doc.at("e_bar").get<double>() == doctest::Approx(-0.8699937009308494).epsilon(1e-10));
    CHECK(doc.at("n_k").size() == 20);

    // inconsistent parameter pairs are rejected with a machine-readable record
    r = run_cli("thermal-state --beta 2 -m 20");
    CHECK(r.exit_code == 1);
    json err = json::parse(r.err);
    CHECK(err.at("error").get<std::string>().find("exactly one pair") != std::string::npos);
}

TEST_CASE("lindblad reproduces the closed-form steady current") {
    CliResult r = run_cli("lindblad -l 3 --gamma 0.07 --n-left 1 --n-right 0.5");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    const double expect = 1.0 * 0.07 / (1.0 + 0.07 * 0.07) * 0.25;
    CHECK(doc.at("current").get<double>() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(doc.at("analytic_current").get<double>() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(doc.at("sigma_diag").size() == 3);
}

TEST_CASE("run executes a scenario file and renders charts") {
    const fs::path base = fs::temp_directory_path() / "bhpc_cli_run";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path scenario = base / "tiny.json";
    {
        std::ofstream f(scenario);
        f << R"({
            "name": "tiny",
            "layout": {"kind": "ring", "m": 4},
            "init": {"whole": {"beta": 1.0, "n_bar": 1.0}},
            "run": {"dt": 0.05, "t_final": 1.0, "sample_every": 0.5, "n_traj": 16, "seed": 3}
        })";
    }
    const fs::path out = base / "out";
    CliResult r = run_cli("run --scenario " + scenario.string() + " --out " + out.string() +
                          " --workers 2");
    REQUIRE(r.exit_code == 0);
    json man = json::parse(r.out);
    CHECK(man.at("name") == "tiny");
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "populations.csv"));
    CHECK(fs::exists(out / "populations.svg"));  // charts rendered by default

    // --no-plot suppresses the SVGs
    const fs::path out2 = base / "out2";
    r = run_cli("run --scenario " + scenario.string() + " --out " + out2.string() + " --no-plot");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(out2 / "populations.csv"));
    CHECK_FALSE(fs::exists(out2 / "populations.svg"));

    // the standalone plot subcommand fills them in afterwards
    r = run_cli("plot --dir " + out2.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out2 / "populations.svg"));
    fs::remove_all(base);
}

TEST_CASE("errors come back as one JSON record on stderr") {
    CliResult r = run_cli("run --builtin bogus");
    CHECK(r.exit_code == 1);
    json err = json::parse(r.err);
    CHECK(err.at("error").get<std::string>().find("bogus") != std::string::npos);

    r = run_cli("run");
    CHECK(r.exit_code == 1);
    CHECK(json::parse(r.err).at("error").get<std::string>().find("--scenario") !=
          std::string::npos);

    r = run_cli("plot --dir /nonexistent_bhpc_dir");
    CHECK(r.exit_code == 1);
    CHECK(json::parse(r.err).contains("error"));
}
