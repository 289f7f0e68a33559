#pragma once

#include <json.hpp>
#include <string>

#include "bhpc/scenario.hpp"

namespace bhpc {

struct RunResult {
    std::string out_dir;
    nlohmann::json manifest;
};

/// Executes a scenario: samples the ensemble, propagates it, and writes CSV
/// tables plus manifest.json into out_dir (created if needed). Every output
/// byte is independent of the worker count: trajectories are reduced in fixed
/// micro-batch order and numbers are printed in shortest round-trip form.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir, int workers);

/// Renders an SVG chart next to every recognized CSV table in dir. A pure view
/// of the tables (no recomputation), so re-rendering is byte-identical.
/// Throws if the directory holds no recognized tables.
void render_charts(const std::string& dir);

}  // namespace bhpc
