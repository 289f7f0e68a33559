#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bhpc {

/// Initial state of one lattice region: empty, a (beta, mu) point, a
/// (beta, n_bar) point (mu solved), or an (n_bar, e_bar) point (both solved).
struct RegionStateSpec {
    std::string region;
    bool empty = false;
    std::optional<double> beta;
    std::optional<double> mu;
    std::optional<double> n_bar;
    std::optional<double> e_bar;
    bool shifted = false;
};

struct SpdmAnalysis {
    std::vector<double> times;
    bool bloch = true;
    std::vector<std::string> regions;  ///< empty = whole layout
};

struct BlochSeriesAnalysis {
    std::vector<std::string> regions;
};

struct LyapunovAnalysis {
    double t_total = 2000.0;
    double tau_r = 1.0;
    int n_traj = 0;  ///< 0 = all trajectories
};

struct TransportAnalysis {
    std::optional<double> window_start;
    std::optional<double> window_end;
};

struct HistogramAnalysis {
    std::string component = "total";  ///< total | kinetic | potential
    int bins = 61;
    std::vector<double> times{0.0};
    std::optional<double> lo;
    std::optional<double> hi;
};

struct RefitAnalysis {
    std::vector<double> times;
    std::vector<std::string> regions;  ///< empty = whole layout
};

struct AnalysisSpec {
    std::optional<SpdmAnalysis> spdm;
    std::optional<BlochSeriesAnalysis> bloch_series;
    std::optional<LyapunovAnalysis> lyapunov;
    std::optional<TransportAnalysis> transport;
    std::optional<HistogramAnalysis> histogram;
    std::optional<RefitAnalysis> refit;
};

struct SweepSpec {
    std::string axis = "beta";  ///< beta | coupling | ring_size
    std::vector<double> values;
    int m = 20;
    double g = 0.4;
    double beta = 0.5;
    double n_bar = 1.0;
    double e_target = -0.533;
    bool shifted = false;
    int n_samples = 100;
    double t_total = 1000.0;
    double tau_r = 1.0;
    double dt = 0.05;
    std::uint64_t seed = 0;
};

struct Scenario {
    std::string name;
    std::string mode = "evolve";  ///< evolve | sweep

    // layout + physics (evolve mode)
    std::string layout_kind = "ring";  ///< ring | two_rings_point | two_rings_chain
    int m = 20;
    int l = 0;
    double epsilon = 0.0;
    double j = 1.0;
    double g = 0.4;
    double g_chain = 0.0;

    std::vector<RegionStateSpec> init;

    // run (evolve mode)
    double dt = 0.05;
    double t_final = 100.0;
    std::optional<double> sample_every;
    std::vector<double> sample_times;
    int n_traj = 2048;
    std::uint64_t seed = 0;

    AnalysisSpec analysis;
    std::optional<SweepSpec> sweep;
};

/// Strict parser: every unknown key is an error naming its JSON path.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& sc);

/// Semantic validation beyond the schema (regions cover the layout exactly
/// once, exactly one state form per region, sampling grid well-formed, ...).
void validate_scenario(const Scenario& sc);

/// Built-in experiment definitions, by role:
///   relax        one ring self-thermalizing from its quantum ensemble
///   equilibrate  two point-coupled rings exchanging energy
///   transport    two rings bridged by a non-interacting chain
///   sweep        Lyapunov exponent across a temperature grid
///   refit        strong-coupling steady state vs. adjusted thermal fit
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace bhpc
