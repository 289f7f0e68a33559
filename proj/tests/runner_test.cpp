#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bhpc/runner.hpp"
#include "bhpc/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Small two-ring scenario exercising every analysis block; ~130 trajectories
/// so the ensemble spans several micro-batches.
bhpc::Scenario small_scenario() {
    json doc = json::parse(R"({
        "name": "mini",
        "layout": {"kind": "two_rings_point", "m": 4, "epsilon": 0.3},
        "physics": {"g": 0.4},
        "init": {"left_ring": {"beta": 1.0, "n_bar": 1.0},
                 "right_ring": {"beta": 1.0, "n_bar": 0.5}},
        "run": {"dt": 0.05, "t_final": 2.0, "sample_every": 0.5, "n_traj": 130, "seed": 11},
        "analysis": {
            "spdm": {"times": [0.0, 2.0], "regions": ["left_ring"]},
            "bloch_series": {"regions": ["left_ring"]},
            "transport": {"window_start": 0.5, "window_end": 2.0},
            "histogram": {"component": "total", "bins": 9, "times": [0.0]},
            "refit": {"times": [0.0], "regions": ["left_ring"]},
            "lyapunov": {"t_total": 2.0, "tau_r": 0.5, "n_traj": 8}
        }
    })");
    return bhpc::parse_scenario(doc);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_scenario writes every declared output plus a sane manifest") {
    TempDir tmp("bhpc_runner_basic");
    bhpc::RunResult res = bhpc::run_scenario(small_scenario(), tmp.path.string(), 2);

    const json& man = res.manifest;
    for (const auto& name : man.at("outputs")) CHECK(fs::exists(tmp.path / name.get<std::string>()));
    CHECK(fs::exists(tmp.path / "manifest.json"));
    CHECK(json::parse(slurp(tmp.path / "manifest.json")) == man);

    // resolved thermal states carry the solved chemical potentials
    CHECK(man.at("thermal_points").contains("left_ring"));
    CHECK(man.at("thermal_points").at("left_ring").at("mu").get<double>() < -1.0);
    CHECK(man.at("thermal_points").at("left_ring").at("n_bar").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));

    // the propagator is unitary: per-trajectory norms cannot drift
    CHECK(man.at("max_norm_drift").get<double>() < 1e-10);

    // analysis blocks all reported
    CHECK(man.at("analysis").contains("transport"));
    CHECK(man.at("analysis").at("transport").contains("fit"));
    CHECK(man.at("analysis").at("lyapunov").at("n_traj").get<int>() == 8);
    CHECK(man.at("analysis").at("spdm").size() == 4);  // 2 times x (wannier + bloch)
    CHECK(man.at("analysis").at("refit")[0].at("beta").get<double>() ==
          doctest::Approx(1.0).epsilon(0.5));

    // SPDM trace equals the region particle number at t=0 (left ring: n_bar=1, m=4)
    CHECK(man.at("analysis").at("spdm")[0].at("trace").get<double>() ==
          doctest::Approx(4.0).epsilon(0.2));

    // counts.csv holds a conserved total: first and last rows agree to rounding
    std::string counts = slurp(tmp.path / "counts.csv");
    std::istringstream lines(counts);
    std::string header, first, line, last;
    std::getline(lines, header);
    std::getline(lines, first);
    while (std::getline(lines, line))
        if (!line.empty()) last = line;
    auto total_of = [&](const std::string& row) {
        std::istringstream ss(row);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        return cells[3];  // time,left_ring,right_ring,total,delta_n,current
    };
    CHECK(header == "time,left_ring,right_ring,total,delta_n,current");
    CHECK(total_of(first) == doctest::Approx(total_of(last)).epsilon(1e-12));
}

TEST_CASE("outputs are byte-identical for any worker count") {
    TempDir a("bhpc_runner_w1"), b("bhpc_runner_w3");
    bhpc::run_scenario(small_scenario(), a.path.string(), 1);
    bhpc::run_scenario(small_scenario(), b.path.string(), 3);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a.path)) {
        if (entry.path().extension() != ".csv") continue;
        CAPTURE(entry.path().filename().string());
        CHECK(slurp(entry.path()) == slurp(b.path / entry.path().filename()));
        ++compared;
    }
    CHECK(compared >= 6);
}

TEST_CASE("render_charts draws every expected figure and is idempotent") {
    TempDir tmp("bhpc_runner_charts");
    bhpc::run_scenario(small_scenario(), tmp.path.string(), 2);
    bhpc::render_charts(tmp.path.string());

    for (const char* name :
         {"populations.svg", "counts.svg", "transport_z.svg", "transport_current.svg",
          "lyapunov.svg", "refit_beta.svg", "refit_mu.svg", "bloch_diag_left_ring.svg",
          "histogram_total.svg", "spdm_wannier_left_ring_diag.svg",
          "spdm_bloch_left_ring_t0.svg"})
        CHECK(fs::exists(tmp.path / name));

    std::string before = slurp(tmp.path / "populations.svg");
    bhpc::render_charts(tmp.path.string());
    CHECK(slurp(tmp.path / "populations.svg") == before);
}

TEST_CASE("render_charts rejects directories without recognized tables") {
    TempDir tmp("bhpc_runner_empty");
    fs::create_directories(tmp.path);
    CHECK_THROWS_AS(bhpc::render_charts(tmp.path.string()), std::runtime_error);
    CHECK_THROWS_AS(bhpc::render_charts((tmp.path / "missing").string()), std::runtime_error);
}

TEST_CASE("sweep scenarios produce sweep.csv with one row per grid value") {
    TempDir tmp("bhpc_runner_sweep");
    json doc = {{"name", "sw"},
                {"mode", "sweep"},
                {"sweep",
                 {{"axis", "beta"},
                  {"values", {0.5, 1.0}},
                  {"m", 4},
                  {"n_samples", 4},
                  {"t_total", 2.0},
                  {"tau_r", 0.5},
                  {"dt", 0.05}}}};
    bhpc::RunResult res = bhpc::run_scenario(bhpc::parse_scenario(doc), tmp.path.string(), 2);
    CHECK(res.manifest.at("analysis").at("sweep").size() == 2);
    std::string csv = slurp(tmp.path / "sweep.csv");
    CHECK(csv.rfind("beta,e_kin,e_tot,lambda_mean,lambda_sem,n_samples", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    bhpc::render_charts(tmp.path.string());
    CHECK(fs::exists(tmp.path / "sweep_lambda.svg"));
    CHECK(fs::exists(tmp.path / "sweep_energy.svg"));
}

TEST_CASE("non-commensurate sample times are snapped with a warning") {
    bhpc::Scenario sc = small_scenario();
    sc.analysis = {};
    sc.sample_every.reset();
    sc.sample_times = {0.0, 0.512, 1.0};
    TempDir tmp("bhpc_runner_snap");
    bhpc::RunResult res = bhpc::run_scenario(sc, tmp.path.string(), 1);
    REQUIRE(res.manifest.at("warnings").size() >= 1);
    std::string w = res.manifest.at("warnings")[0].get<std::string>();
    CHECK(w.find("0.512") != std::string::npos);
    CHECK(res.manifest.at("outputs").size() == 2);  // populations + counts only
}

TEST_CASE("the scenario captured in a manifest re-runs to identical outputs") {
    TempDir a("bhpc_runner_rt1"), b("bhpc_runner_rt2");
    bhpc::RunResult first = bhpc::run_scenario(small_scenario(), a.path.string(), 2);
    bhpc::Scenario replay = bhpc::parse_scenario(first.manifest.at("scenario"));
    bhpc::RunResult second = bhpc::run_scenario(replay, b.path.string(), 1);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a.path)) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        CHECK(slurp(entry.path()) == slurp(b.path / entry.path().filename()));
    }
    CHECK(compared >= 6);
    // the replay's manifest must agree up to the worker count, which is a
    // view-only execution detail
    json m1 = first.manifest, m2 = second.manifest;
    m1["workers"] = 0;
    m2["workers"] = 0;
    CHECK(m1 == m2);
}
