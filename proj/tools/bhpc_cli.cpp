// Command-line driver: runs experiment scenarios (built-in or from JSON),
// solves thermal reference states, evaluates the driven-chain steady state,
// and renders charts for an existing run directory.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <thread>

#include "bhpc/driven_chain.hpp"
#include "bhpc/runner.hpp"
#include "bhpc/scenario.hpp"
#include "bhpc/thermal.hpp"

namespace {

using nlohmann::json;

struct RunOpts {
    std::string scenario_file;
    std::string builtin;
    std::string out;
    int workers = 0;  // 0 = one per hardware thread
    std::optional<std::uint64_t> seed;
    std::optional<int> n_traj;
    std::optional<double> t_final;
    std::optional<double> dt;
    std::optional<double> epsilon;
    std::optional<double> g;
    bool no_plot = false;
};

void add_run_options(CLI::App* cmd, RunOpts& o) {
    cmd->add_option("-o,--out", o.out, "output directory (default runs/<name>)");
    cmd->add_option("-w,--workers", o.workers, "worker threads (default: hardware)");
    cmd->add_option("--seed", o.seed, "RNG seed override");
    cmd->add_option("--n-traj", o.n_traj, "trajectory count override (sweep: samples per point)");
    cmd->add_option("--t-final", o.t_final, "final time override (sweep: averaging time)");
    cmd->add_option("--dt", o.dt, "time step override");
    cmd->add_option("--epsilon", o.epsilon, "junction coupling override");
    cmd->add_option("--g", o.g, "interaction strength override");
    cmd->add_flag("--no-plot", o.no_plot, "skip SVG rendering");
}

void apply_overrides(bhpc::Scenario& sc, const RunOpts& o) {
    if (sc.mode == "sweep") {
        bhpc::SweepSpec& sw = *sc.sweep;
        if (o.seed) sw.seed = *o.seed;
        if (o.n_traj) sw.n_samples = *o.n_traj;
        if (o.t_final) sw.t_total = *o.t_final;
        if (o.dt) sw.dt = *o.dt;
        if (o.g) sw.g = *o.g;
        if (o.epsilon)
            throw std::invalid_argument("--epsilon applies to evolve scenarios, not sweeps");
        return;
    }
    if (o.seed) sc.seed = *o.seed;
    if (o.n_traj) sc.n_traj = *o.n_traj;
    if (o.t_final) sc.t_final = *o.t_final;
    if (o.dt) sc.dt = *o.dt;
    if (o.epsilon) sc.epsilon = *o.epsilon;
    if (o.g) sc.g = *o.g;
}

int execute_run(const RunOpts& o) {
    bhpc::Scenario sc =
        o.builtin.empty() ? bhpc::load_scenario(o.scenario_file) : bhpc::builtin_scenario(o.builtin);
    apply_overrides(sc, o);
    int workers = o.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::string out = o.out.empty() ? "runs/" + sc.name : o.out;
    bhpc::RunResult res = bhpc::run_scenario(sc, out, workers);
    if (!o.no_plot) bhpc::render_charts(res.out_dir);
    std::cout << res.manifest.dump(2) << '\n';
    return 0;
}

int execute_thermal_state(int m, double j_hop, std::optional<double> beta,
                          std::optional<double> mu, std::optional<double> n_bar,
                          std::optional<double> e_bar, bool shifted, bool occupations) {
    const bool bm = beta && mu && !n_bar && !e_bar;
    const bool bn = beta && n_bar && !mu && !e_bar;
    const bool ne = n_bar && e_bar && !beta && !mu;
    if (!bm && !bn && !ne)
        throw std::invalid_argument(
            "give exactly one pair: --beta/--mu, --beta/--n-bar, or --n-bar/--e-bar");
    bhpc::ThermalPoint pt;
    if (bm) {
        if (*beta == 0.0)
            throw std::invalid_argument("at beta = 0 use --n-bar; mu is formally -inf");
        pt.beta = *beta;
        pt.mu = *mu;
        pt.m = m;
        bhpc::BeMoments mom = bhpc::be_moments(*beta, *mu, m, j_hop);
        pt.n_bar = mom.n_bar;
        pt.e_bar = mom.e_bar;
    } else if (bn) {
        pt = *beta == 0.0 ? bhpc::uniform_point(*n_bar, m)
                          : bhpc::thermal_point(*beta, *n_bar, m, j_hop);
    } else {
        pt = bhpc::solve_beta_mu(*n_bar, *e_bar, m, j_hop);
    }
    json out = {{"beta", pt.beta}, {"mu", pt.mu},      {"n_bar", pt.n_bar},
                {"e_bar", pt.e_bar}, {"m", pt.m},      {"j", j_hop},
                {"shifted", shifted}};
    if (occupations) {
        Eigen::VectorXd nk = bhpc::mode_occupations(pt, shifted);
        out["n_k"] = std::vector<double>(nk.data(), nk.data() + nk.size());
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int execute_lindblad(int l, double j_hop, double gamma, std::optional<double> gamma_left,
                     std::optional<double> gamma_right, double n_left, double n_right) {
    bhpc::DrivenChainSpec spec;
    spec.l = l;
    spec.j_hop = j_hop;
    spec.gamma_l = gamma_left.value_or(gamma);
    spec.gamma_r = gamma_right.value_or(gamma);
    spec.n_l = n_left;
    spec.n_r = n_right;
    bhpc::SteadyCovariance ss = bhpc::steady_covariance(spec);
    json out = {{"l", spec.l},
                {"j", spec.j_hop},
                {"gamma_left", spec.gamma_l},
                {"gamma_right", spec.gamma_r},
                {"n_left", spec.n_l},
                {"n_right", spec.n_r},
                {"current", ss.current},
                {"bond_currents", ss.bond_currents}};
    std::vector<double> diag;
    for (int i = 0; i < ss.sigma.rows(); ++i) diag.push_back(ss.sigma(i, i).real());
    out["sigma_diag"] = diag;
    if (spec.gamma_l == spec.gamma_r)
        out["analytic_current"] = bhpc::analytic_current(spec);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical-field ensemble simulator for interacting lattice bosons"};
    app.require_subcommand(1);

    RunOpts run_opts;
    CLI::App* run = app.add_subcommand("run", "run a scenario from JSON or by built-in name");
    CLI::Option* opt_file =
        run->add_option("-s,--scenario", run_opts.scenario_file, "scenario JSON file");
    CLI::Option* opt_builtin =
        run->add_option("-b,--builtin", run_opts.builtin,
                        "built-in scenario: relax, equilibrate, transport, sweep, refit");
    opt_file->excludes(opt_builtin);
    add_run_options(run, run_opts);

    std::vector<CLI::App*> shortcuts;
    for (const std::string& name : bhpc::builtin_names()) {
        CLI::App* cmd = app.add_subcommand(name, "run the built-in " + name + " scenario");
        add_run_options(cmd, run_opts);
        shortcuts.push_back(cmd);
    }

    int ts_m = 20;
    double ts_j = 1.0;
    std::optional<double> ts_beta, ts_mu, ts_nbar, ts_ebar;
    bool ts_shifted = false, ts_occ = false;
    CLI::App* ts = app.add_subcommand(
        "thermal-state", "solve a Bose-Einstein ring state from two of its parameters");
    ts->add_option("-m,--m", ts_m, "ring size")->capture_default_str();
    ts->add_option("-j,--j", ts_j, "hopping energy")->capture_default_str();
    ts->add_option("--beta", ts_beta, "inverse temperature");
    ts->add_option("--mu", ts_mu, "chemical potential");
    ts->add_option("--n-bar", ts_nbar, "mean density per site");
    ts->add_option("--e-bar", ts_ebar, "mean kinetic energy per site");
    ts->add_flag("--shifted", ts_shifted, "report the half-zone-shifted occupations");
    ts->add_flag("--occupations", ts_occ, "include the mode occupations n_k");

    int lb_l = 1;
    double lb_j = 1.0, lb_gamma = 1.0, lb_nl = 1.0, lb_nr = 0.0;
    std::optional<double> lb_gl, lb_gr;
    CLI::App* lb = app.add_subcommand(
        "lindblad", "steady state of the boundary-driven non-interacting chain");
    lb->add_option("-l,--length", lb_l, "chain length")->capture_default_str();
    lb->add_option("-j,--j", lb_j, "hopping energy")->capture_default_str();
    lb->add_option("--gamma", lb_gamma, "boundary rate (both ends)")->capture_default_str();
    lb->add_option("--gamma-left", lb_gl, "left boundary rate override");
    lb->add_option("--gamma-right", lb_gr, "right boundary rate override");
    lb->add_option("--n-left", lb_nl, "left reservoir density")->capture_default_str();
    lb->add_option("--n-right", lb_nr, "right reservoir density")->capture_default_str();

    std::string plot_dir;
    CLI::App* plot = app.add_subcommand("plot", "render SVG charts for an existing run directory");
    plot->add_option("-d,--dir", plot_dir, "run directory holding the CSV tables")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            if (run_opts.scenario_file.empty() && run_opts.builtin.empty())
                throw std::invalid_argument("run needs --scenario FILE or --builtin NAME");
            return execute_run(run_opts);
        }
        for (std::size_t i = 0; i < shortcuts.size(); ++i)
            if (app.got_subcommand(shortcuts[i])) {
                run_opts.builtin = bhpc::builtin_names()[i];
                return execute_run(run_opts);
            }
        if (app.got_subcommand(ts))
            return execute_thermal_state(ts_m, ts_j, ts_beta, ts_mu, ts_nbar, ts_ebar, ts_shifted,
                                         ts_occ);
        if (app.got_subcommand(lb))
            return execute_lindblad(lb_l, lb_j, lb_gamma, lb_gl, lb_gr, lb_nl, lb_nr);
        if (app.got_subcommand(plot)) {
            bhpc::render_charts(plot_dir);
            std::cout << json{{"rendered", plot_dir}}.dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
