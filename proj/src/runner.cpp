#include "bhpc/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhpc/dynamics.hpp"
#include "bhpc/lattice.hpp"
#include "bhpc/lyapunov.hpp"
#include "bhpc/observables.hpp"
#include "bhpc/svgplot.hpp"
#include "bhpc/thermal.hpp"

namespace bhpc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- formatting -------------------------------------------------------------

/// Shortest round-trip decimal form; the same bits always print the same text.
std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

/// Filename-safe time tag: 100 -> "100", 0.5 -> "0p5".
std::string time_tag(double t) {
    std::string s = fmt_num(t);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

using Row = std::vector<std::string>;

void write_csv(const fs::path& path, const Row& header, const std::vector<Row>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const Row& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---- scenario resolution ----------------------------------------------------

LayoutSpec layout_from(const Scenario& sc) {
    if (sc.layout_kind == "ring") return LayoutSpec::ring(sc.m, sc.j, sc.g);
    if (sc.layout_kind == "two_rings_point")
        return LayoutSpec::two_rings_point(sc.m, sc.epsilon, sc.j, sc.g);
    return LayoutSpec::two_rings_chain(sc.m, sc.l, sc.epsilon, sc.j, sc.g, sc.g_chain);
}

RegionInit resolve_region(const RegionStateSpec& st, int m, double j_hop) {
    RegionInit init;
    init.region = region_from_name(st.region);
    init.shifted = st.shifted;
    if (st.empty) return init;
    ThermalPoint pt;
    if (st.beta && st.mu) {
        if (*st.beta == 0.0)
            throw std::invalid_argument("init." + st.region +
                                        ": at beta = 0 use {beta, n_bar}; mu is formally -inf");
        pt.beta = *st.beta;
        pt.mu = *st.mu;
        pt.m = m;
        BeMoments mom = be_moments(pt.beta, pt.mu, m, j_hop);
        pt.n_bar = mom.n_bar;
        pt.e_bar = mom.e_bar;
    } else if (st.beta && st.n_bar) {
        pt = *st.beta == 0.0 ? uniform_point(*st.n_bar, m)
                             : thermal_point(*st.beta, *st.n_bar, m, j_hop);
    } else {
        pt = solve_beta_mu(*st.n_bar, *st.e_bar, m, j_hop);
    }
    init.point = pt;
    return init;
}

json point_json(const ThermalPoint& pt, bool shifted) {
    return {{"beta", pt.beta},   {"mu", pt.mu}, {"n_bar", pt.n_bar},
            {"e_bar", pt.e_bar}, {"m", pt.m},   {"shifted", shifted}};
}

std::vector<Region> resolve_regions(const std::vector<std::string>& names, const Scenario& sc) {
    std::vector<Region> out;
    if (!names.empty()) {
        for (const auto& n : names) out.push_back(region_from_name(n));
        return out;
    }
    if (sc.layout_kind == "ring") return {Region::Whole};
    return {Region::LeftRing, Region::RightRing};
}

bool is_ring_region(const Scenario& sc, Region r) {
    if (r == Region::LeftRing || r == Region::RightRing) return true;
    return r == Region::Whole && sc.layout_kind == "ring";
}

EnergyComponent component_from(const std::string& name) {
    if (name == "total") return EnergyComponent::Total;
    if (name == "kinetic") return EnergyComponent::Kinetic;
    return EnergyComponent::Potential;
}

// ---- sweep mode ---------------------------------------------------------------

RunResult run_sweep(const Scenario& sc, const fs::path& dir, int workers, json manifest) {
    const SweepSpec& sw = *sc.sweep;
    SweepConfig cfg;
    cfg.axis = sw.axis == "beta"       ? SweepAxis::Beta
               : sw.axis == "coupling" ? SweepAxis::Coupling
                                       : SweepAxis::RingSize;
    cfg.values = sw.values;
    cfg.m = sw.m;
    cfg.g = sw.g;
    cfg.beta = sw.beta;
    cfg.n_bar = sw.n_bar;
    cfg.e_target = sw.e_target;
    cfg.shifted = sw.shifted;
    cfg.n_samples = sw.n_samples;
    cfg.t_total = sw.t_total;
    cfg.tau_r = sw.tau_r;
    cfg.dt = sw.dt;
    cfg.seed = sw.seed;

    std::vector<SweepPoint> points = lyapunov_sweep(cfg, workers);

    std::vector<Row> rows;
    json jpoints = json::array();
    for (const SweepPoint& p : points) {
        rows.push_back({fmt_num(p.grid_value), fmt_num(p.e_kin), fmt_num(p.e_tot),
                        fmt_num(p.lambda_mean), fmt_num(p.lambda_sem),
                        std::to_string(p.n_samples)});
        jpoints.push_back({{sw.axis, p.grid_value},
                           {"e_kin", p.e_kin},
                           {"e_tot", p.e_tot},
                           {"lambda_mean", p.lambda_mean},
                           {"lambda_sem", p.lambda_sem},
                           {"n_samples", p.n_samples}});
    }
    write_csv(dir / "sweep.csv",
              {sw.axis, "e_kin", "e_tot", "lambda_mean", "lambda_sem", "n_samples"}, rows);
    manifest["analysis"]["sweep"] = jpoints;
    manifest["outputs"] = json::array({"sweep.csv"});

    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
    return {dir.string(), manifest};
}

// ---- streamed per-sample statistics -----------------------------------------

struct BlochStream {
    Region region{};
    std::string name;
    std::vector<int> sites;
    Eigen::MatrixXcd fh;                  ///< DFT adjoint, modes = fh * amplitudes
    std::vector<Eigen::VectorXd> slots;   ///< [sample * n_batches + batch]
};

}  // namespace

RunResult run_scenario(const Scenario& sc, const std::string& out_dir, int workers) {
    validate_scenario(sc);
    if (workers < 1) workers = 1;
    fs::path dir(out_dir);
    fs::create_directories(dir);

    json manifest;
    manifest["name"] = sc.name;
    manifest["scenario"] = to_json(sc);
    manifest["workers"] = workers;

    if (sc.mode == "sweep") return run_sweep(sc, dir, workers, std::move(manifest));

    // ---- resolve layout, thermal states, ensemble ----------------------------
    SiteGraph graph = build_layout(layout_from(sc));
    const int n_sites = graph.n_sites;
    manifest["n_sites"] = n_sites;

    std::vector<RegionInit> inits;
    json tp = json::object();
    for (const RegionStateSpec& st : sc.init) {
        RegionInit ri = resolve_region(st, sc.m, sc.j);
        if (ri.point) tp[st.region] = point_json(*ri.point, ri.shifted);
        inits.push_back(ri);
    }
    manifest["thermal_points"] = tp;

    Ensemble ens = sample_layout_ensemble(graph, inits, sc.n_traj, sc.seed);
    Propagator prop = make_propagator(graph, sc.dt);

    // ---- sample plan: regular series plus the analysis snapshot times --------
    std::vector<std::string> warnings;
    std::map<long long, bool> steps;  // step -> needs a full snapshot
    auto add_times = [&](const std::vector<double>& ts, bool snapshot) {
        for (double t : ts) {
            if (t < 0.0) throw std::invalid_argument("negative sample time");
            long long k = std::llround(t / sc.dt);
            if (std::abs(t - static_cast<double>(k) * sc.dt) > 1e-9 * std::max(1.0, std::abs(t)))
                warnings.push_back("sample time " + fmt_num(t) + " snapped to " +
                                   fmt_num(static_cast<double>(k) * sc.dt));
            auto [it, inserted] = steps.try_emplace(k, snapshot);
            if (!inserted) it->second = it->second || snapshot;
        }
    };
    if (sc.sample_every) {
        std::vector<double> grid;
        const double every = *sc.sample_every;
        const int last = static_cast<int>(std::floor(sc.t_final / every + 1e-9));
        for (int i = 0; i <= last; ++i) grid.push_back(i * every);
        add_times(grid, false);
    } else {
        add_times(sc.sample_times, false);
    }
    if (sc.analysis.spdm) add_times(sc.analysis.spdm->times, true);
    if (sc.analysis.histogram) add_times(sc.analysis.histogram->times, true);
    if (sc.analysis.refit) add_times(sc.analysis.refit->times, true);

    std::vector<double> wanted;
    for (const auto& [k, snap] : steps) wanted.push_back(static_cast<double>(k) * sc.dt);
    SamplePlan plan = plan_samples(wanted, sc.dt);
    for (const auto& w : plan.warnings) warnings.push_back(w);
    const int n_samples = static_cast<int>(plan.times.size());

    std::unordered_map<long long, int> step_to_sample;
    for (int s = 0; s < n_samples; ++s) step_to_sample[plan.steps[s]] = s;
    auto sample_of = [&](double t) {
        return step_to_sample.at(std::llround(t / sc.dt));
    };

    // ---- streamed statistics --------------------------------------------------
    const int n_traj = ens.n_traj();
    const int n_batches = (n_traj + kBatchCols - 1) / kBatchCols;

    // left-to-right contact path: junction bonds plus internal chain bonds,
    // all stored with i on the left, so bond_current sign is flow to the right
    std::vector<Bond> path_bonds;
    if (graph.has_region(Region::LeftRing)) {
        for (int bi : graph.junction_bonds) path_bonds.push_back(graph.bonds[bi]);
        if (graph.has_region(Region::Chain)) {
            std::set<int> chain_sites;
            for (int s : graph.region_sites(Region::Chain)) chain_sites.insert(s);
            for (const Bond& b : graph.bonds)
                if (chain_sites.count(b.i) && chain_sites.count(b.j)) path_bonds.push_back(b);
        }
    }

    std::vector<BlochStream> bloch_streams;
    if (sc.analysis.bloch_series) {
        for (const std::string& name : sc.analysis.bloch_series->regions) {
            BlochStream bs;
            bs.region = region_from_name(name);
            bs.name = name;
            bs.sites = graph.region_sites(bs.region);
            bs.fh = dft_matrix(static_cast<int>(bs.sites.size())).adjoint();
            bs.slots.assign(static_cast<std::size_t>(n_samples) * n_batches, {});
            bloch_streams.push_back(std::move(bs));
        }
    }

    const std::size_t n_slots = static_cast<std::size_t>(n_samples) * n_batches;
    std::vector<Eigen::VectorXd> pop_slots(n_slots);
    std::vector<std::vector<double>> cur_slots(n_slots);
    std::vector<double> drift_slots(n_slots, 0.0);

    std::map<int, Eigen::MatrixXcd> snapshots;
    for (int s = 0; s < n_samples; ++s)
        if (steps.at(plan.steps[s])) snapshots.emplace(s, Eigen::MatrixXcd::Zero(n_sites, n_traj));

    Eigen::VectorXd norm0 = ens.states.colwise().squaredNorm();

    auto sink = [&](int s, int b, int col0, const Eigen::MatrixXcd& block) {
        const std::size_t idx = static_cast<std::size_t>(s) * n_batches + b;
        pop_slots[idx] = block.array().abs2().rowwise().sum().matrix();
        std::vector<double>& cc = cur_slots[idx];
        cc.resize(path_bonds.size());
        for (std::size_t pb = 0; pb < path_bonds.size(); ++pb) {
            const Bond& bond = path_bonds[pb];
            cc[pb] = bond.hop *
                     block.row(bond.i).conjugate().cwiseProduct(block.row(bond.j)).imag().sum();
        }
        for (BlochStream& bs : bloch_streams) {
            Eigen::MatrixXcd sub(static_cast<int>(bs.sites.size()), block.cols());
            for (std::size_t r = 0; r < bs.sites.size(); ++r)
                sub.row(static_cast<int>(r)) = block.row(bs.sites[r]);
            bs.slots[idx] = (bs.fh * sub).array().abs2().rowwise().sum().matrix();
        }
        double worst = 0.0;
        for (int c = 0; c < block.cols(); ++c) {
            const double n0 = norm0[col0 + c];
            const double n1 = block.col(c).squaredNorm();
            worst = std::max(worst, n0 > 0.0 ? std::abs(n1 / n0 - 1.0) : std::abs(n1));
        }
        drift_slots[idx] = worst;
        auto it = snapshots.find(s);
        if (it != snapshots.end()) it->second.middleCols(col0, block.cols()) = block;
    };

    evolve_batches(ens.states, prop, plan, workers, sink);

    // ---- combine the per-batch partials in fixed batch order ------------------
    std::vector<Eigen::VectorXd> n_site(n_samples);
    std::vector<double> current_series;
    double max_drift = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_sites);
        std::vector<double> cacc(path_bonds.size(), 0.0);
        for (int b = 0; b < n_batches; ++b) {
            const std::size_t idx = static_cast<std::size_t>(s) * n_batches + b;
            acc += pop_slots[idx];
            for (std::size_t pb = 0; pb < path_bonds.size(); ++pb) cacc[pb] += cur_slots[idx][pb];
            max_drift = std::max(max_drift, drift_slots[idx]);
        }
        n_site[s] = acc / n_traj;
        if (!path_bonds.empty()) {
            double mean = 0.0;
            for (double c : cacc) mean += c / n_traj;
            current_series.push_back(mean / static_cast<double>(path_bonds.size()));
        }
    }
    manifest["max_norm_drift"] = max_drift;

    std::vector<std::string> outputs;

    // ---- populations.csv -------------------------------------------------------
    {
        Row header{"time"};
        for (int i = 0; i < n_sites; ++i) header.push_back("site_" + std::to_string(i));
        std::vector<Row> rows;
        for (int s = 0; s < n_samples; ++s) {
            Row r{fmt_num(plan.times[s])};
            for (int i = 0; i < n_sites; ++i) r.push_back(fmt_num(n_site[s][i]));
            rows.push_back(std::move(r));
        }
        write_csv(dir / "populations.csv", header, rows);
        outputs.push_back("populations.csv");
    }

    // ---- counts.csv ------------------------------------------------------------
    const bool two_rings = graph.has_region(Region::LeftRing);
    std::vector<Region> count_regions;
    if (two_rings) {
        count_regions = {Region::LeftRing};
        if (graph.has_region(Region::Chain)) count_regions.push_back(Region::Chain);
        count_regions.push_back(Region::RightRing);
    } else {
        count_regions = {Region::Whole};
    }
    auto region_count = [&](int s, Region r) {
        double sum = 0.0;
        for (int site : graph.region_sites(r)) sum += n_site[s][site];
        return sum;
    };
    std::vector<double> delta_n, z_series;
    if (two_rings) {
        for (int s = 0; s < n_samples; ++s)
            delta_n.push_back(region_count(s, Region::LeftRing) -
                              region_count(s, Region::RightRing));
        for (int s = 0; s < n_samples; ++s) {
            const double ratio = delta_n[s] / delta_n[0];
            z_series.push_back(ratio > 0.0 ? (2.0 / sc.m) * std::log(ratio)
                                           : std::numeric_limits<double>::quiet_NaN());
        }
    }
    {
        Row header{"time"};
        for (Region r : count_regions) header.push_back(region_name(r));
        header.push_back("total");
        if (two_rings) {
            header.push_back("delta_n");
            header.push_back("current");
        }
        std::vector<Row> rows;
        for (int s = 0; s < n_samples; ++s) {
            Row r{fmt_num(plan.times[s])};
            for (Region reg : count_regions) r.push_back(fmt_num(region_count(s, reg)));
            r.push_back(fmt_num(n_site[s].sum()));
            if (two_rings) {
                r.push_back(fmt_num(delta_n[s]));
                r.push_back(fmt_num(current_series[s]));
            }
            rows.push_back(std::move(r));
        }
        write_csv(dir / "counts.csv", header, rows);
        outputs.push_back("counts.csv");
    }

    // ---- bloch_diag_<region>.csv -----------------------------------------------
    for (const BlochStream& bs : bloch_streams) {
        const int m = static_cast<int>(bs.sites.size());
        Row header{"time"};
        for (int k = 0; k < m; ++k) header.push_back("k_" + std::to_string(k));
        std::vector<Row> rows;
        for (int s = 0; s < n_samples; ++s) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
            for (int b = 0; b < n_batches; ++b)
                acc += bs.slots[static_cast<std::size_t>(s) * n_batches + b];
            acc /= n_traj;
            Row r{fmt_num(plan.times[s])};
            for (int k = 0; k < m; ++k) r.push_back(fmt_num(acc[k]));
            rows.push_back(std::move(r));
        }
        const std::string name = "bloch_diag_" + bs.name + ".csv";
        write_csv(dir / name, header, rows);
        outputs.push_back(name);
    }

    json analysis = json::object();

    // ---- transport ---------------------------------------------------------------
    if (sc.analysis.transport) {
        TransportRecord rec;
        rec.times = plan.times;
        for (int s = 0; s < n_samples; ++s) {
            rec.n_left.push_back(region_count(s, Region::LeftRing));
            rec.n_right.push_back(region_count(s, Region::RightRing));
            rec.n_chain.push_back(graph.has_region(Region::Chain)
                                      ? region_count(s, Region::Chain)
                                      : 0.0);
        }
        rec.delta_n = delta_n;
        rec.z = z_series;
        rec.current = current_series;
        rec.m = sc.m;
        rec.j_hop = sc.j;
        rec.epsilon = sc.epsilon;

        {
            Row header{"time", "n_left", "n_chain", "n_right", "delta_n", "z", "current"};
            std::vector<Row> rows;
            for (int s = 0; s < n_samples; ++s)
                rows.push_back({fmt_num(rec.times[s]), fmt_num(rec.n_left[s]),
                                fmt_num(rec.n_chain[s]), fmt_num(rec.n_right[s]),
                                fmt_num(rec.delta_n[s]), fmt_num(rec.z[s]),
                                fmt_num(rec.current[s])});
            write_csv(dir / "transport.csv", header, rows);
            outputs.push_back("transport.csv");
        }

        json jt;
        double t0 = 0.0, t1 = 0.0;
        try {
            if (sc.analysis.transport->window_start) {
                t0 = *sc.analysis.transport->window_start;
                t1 = *sc.analysis.transport->window_end;
            } else {
                std::tie(t0, t1) = default_fit_window(rec);
            }
            jt["window_start"] = t0;
            jt["window_end"] = t1;
            TransportFit fit = transport_fit(rec, t0, t1);
            jt["fit"] = {{"s", fit.s},
                         {"z_slope", fit.z_slope},
                         {"r2", fit.r2},
                         {"t_start", fit.t_start},
                         {"t_end", fit.t_end}};
        } catch (const std::exception& e) {
            jt["fit"] = {{"error", e.what()}};
        }
        try {
            if (t1 > t0) {
                GammaExtraction ge = extract_gamma(rec, sc.j, t0, t1);
                jt["gamma"] = {{"kappa", ge.kappa},
                               {"gamma_big", ge.gamma_big},
                               {"gamma_rate", ge.gamma_rate},
                               {"epsilon", ge.epsilon}};
            }
        } catch (const std::exception& e) {
            jt["gamma"] = {{"error", e.what()}};
        }
        analysis["transport"] = jt;
    }

    // ---- SPDM snapshots ------------------------------------------------------------
    if (sc.analysis.spdm) {
        json list = json::array();
        std::vector<Region> regions = resolve_regions(sc.analysis.spdm->regions, sc);
        std::set<int> done;
        for (double t : sc.analysis.spdm->times) {
            const int s = sample_of(t);
            if (!done.insert(s).second) continue;
            const double ts = plan.times[s];
            const Eigen::MatrixXcd& snap = snapshots.at(s);
            for (Region reg : regions) {
                auto dump = [&](const Spdm& d, const std::string& basis) {
                    Row header{"i", "j", "re", "im", "abs", "sem"};
                    std::vector<Row> rows;
                    const int n = static_cast<int>(d.rho.rows());
                    for (int i = 0; i < n; ++i)
                        for (int jj = 0; jj < n; ++jj)
                            rows.push_back({std::to_string(i), std::to_string(jj),
                                            fmt_num(d.rho(i, jj).real()),
                                            fmt_num(d.rho(i, jj).imag()),
                                            fmt_num(std::abs(d.rho(i, jj))),
                                            fmt_num(d.sem(i, jj))});
                    const std::string name = "spdm_" + basis + "_" + region_name(reg) + "_t" +
                                             time_tag(ts) + ".csv";
                    write_csv(dir / name, header, rows);
                    outputs.push_back(name);
                    list.push_back({{"time", ts},
                                    {"region", region_name(reg)},
                                    {"basis", basis},
                                    {"trace", d.rho.trace().real()},
                                    {"file", name}});
                };
                dump(spdm(snap, graph, reg, ts), "wannier");
                if (sc.analysis.spdm->bloch && is_ring_region(sc, reg))
                    dump(spdm_bloch(snap, graph, reg, ts), "bloch");
            }
        }
        analysis["spdm"] = list;
    }

    // ---- energy histograms ------------------------------------------------------
    if (sc.analysis.histogram) {
        const HistogramAnalysis& ha = *sc.analysis.histogram;
        json list = json::array();
        std::set<int> done;
        for (double t : ha.times) {
            const int s = sample_of(t);
            if (!done.insert(s).second) continue;
            const double ts = plan.times[s];
            Histogram h = energy_histogram(snapshots.at(s), graph, component_from(ha.component),
                                           ha.bins, ha.lo.value_or(0.0), ha.hi.value_or(0.0));
            Row header{"bin_lo", "bin_hi", "count", "density"};
            std::vector<Row> rows;
            const double n_total = static_cast<double>(h.values.size());
            for (std::size_t i = 0; i < h.counts.size(); ++i) {
                const double width = h.edges[i + 1] - h.edges[i];
                rows.push_back({fmt_num(h.edges[i]), fmt_num(h.edges[i + 1]),
                                std::to_string(h.counts[i]),
                                fmt_num(h.counts[i] / (n_total * width))});
            }
            const std::string name =
                "histogram_" + ha.component + "_t" + time_tag(ts) + ".csv";
            write_csv(dir / name, header, rows);
            outputs.push_back(name);
            list.push_back({{"time", ts},
                            {"component", ha.component},
                            {"mean", h.mean},
                            {"sem", h.sem},
                            {"file", name}});
        }
        analysis["histogram"] = list;
    }

    // ---- thermal refits -----------------------------------------------------------
    if (sc.analysis.refit) {
        json list = json::array();
        std::vector<Region> regions = resolve_regions(sc.analysis.refit->regions, sc);
        Row header{"time", "region", "beta", "mu", "n_bar", "e_bar", "max_dev", "max_rel_dev"};
        std::vector<Row> rows;
        std::set<int> done;
        for (double t : sc.analysis.refit->times) {
            const int s = sample_of(t);
            if (!done.insert(s).second) continue;
            const double ts = plan.times[s];
            for (Region reg : regions) {
                RefitResult rr = be_refit(snapshots.at(s), graph, reg);
                rows.push_back({fmt_num(ts), region_name(reg), fmt_num(rr.point.beta),
                                fmt_num(rr.point.mu), fmt_num(rr.point.n_bar),
                                fmt_num(rr.point.e_bar), fmt_num(rr.max_dev),
                                fmt_num(rr.max_rel_dev)});
                list.push_back({{"time", ts},
                                {"region", region_name(reg)},
                                {"beta", rr.point.beta},
                                {"mu", rr.point.mu},
                                {"n_bar", rr.point.n_bar},
                                {"e_bar", rr.point.e_bar},
                                {"max_dev", rr.max_dev},
                                {"max_rel_dev", rr.max_rel_dev}});
            }
        }
        write_csv(dir / "refit.csv", header, rows);
        outputs.push_back("refit.csv");
        analysis["refit"] = list;
    }

    // ---- Lyapunov spectrum ----------------------------------------------------------
    if (sc.analysis.lyapunov) {
        const LyapunovAnalysis& la = *sc.analysis.lyapunov;
        const int n = la.n_traj == 0 ? n_traj : la.n_traj;
        EnsembleLyapunov el = ensemble_lyapunov(graph, ens.states.leftCols(n), la.t_total,
                                                la.tau_r, sc.dt, sc.seed, workers);
        Row header{"trajectory", "lambda"};
        std::vector<Row> rows;
        for (std::size_t i = 0; i < el.lambdas.size(); ++i)
            rows.push_back({std::to_string(i), fmt_num(el.lambdas[i])});
        write_csv(dir / "lyapunov.csv", header, rows);
        outputs.push_back("lyapunov.csv");
        analysis["lyapunov"] = {{"mean", el.mean},
                                {"sem", el.sem},
                                {"n_traj", n},
                                {"t_total", la.t_total},
                                {"tau_r", la.tau_r}};
    }

    manifest["analysis"] = analysis;
    manifest["warnings"] = warnings;
    manifest["outputs"] = outputs;

    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    mf << manifest.dump(2) << '\n';
    return {dir.string(), manifest};
}

// ============================ chart rendering ==================================

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::runtime_error("csv column " + name + " not found");
    }
    double num(std::size_t row, int c) const { return std::strtod(cells[row][c].c_str(), nullptr); }
    std::size_t rows() const { return cells.size(); }
};

Table read_table(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Table t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                out.push_back(s.substr(start));
                break;
            }
            out.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return out;
    };
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        t.cells.push_back(split(line));
    }
    return t;
}

double tag_to_time(const std::string& tag) {
    std::string s = tag;
    for (char& c : s)
        if (c == 'p') c = '.';
    return std::strtod(s.c_str(), nullptr);
}

/// Heatmap over a (time, index) table whose first column is time.
svg::Heatmap series_heatmap(const Table& t, const std::string& title, const std::string& y_label) {
    svg::Heatmap hm;
    hm.title = title;
    hm.x_label = "time";
    hm.y_label = y_label;
    const std::size_t n_rows = t.rows();
    const std::size_t n_idx = t.header.size() - 1;
    hm.values.assign(n_idx, std::vector<double>(n_rows, 0.0));
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t i = 0; i < n_idx; ++i)
            hm.values[i][r] = t.num(r, static_cast<int>(i + 1));
    hm.x0 = n_rows ? t.num(0, 0) : 0.0;
    hm.x1 = n_rows ? t.num(n_rows - 1, 0) : 1.0;
    hm.y0 = -0.5;
    hm.y1 = static_cast<double>(n_idx) - 0.5;
    return hm;
}

svg::Series column_series(const Table& t, int xc, int yc, const std::string& label) {
    svg::Series s;
    s.label = label;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        s.x.push_back(t.num(r, xc));
        s.y.push_back(t.num(r, yc));
    }
    return s;
}

void emit(const fs::path& dir, const std::string& name, const std::string& content,
          std::vector<std::string>& made) {
    svg::write_svg((dir / name).string(), content);
    made.push_back(name);
}

}  // namespace

void render_charts(const std::string& dir_in) {
    fs::path dir(dir_in);
    if (!fs::is_directory(dir)) throw std::runtime_error(dir_in + " is not a directory");

    std::vector<std::string> csvs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            csvs.push_back(entry.path().filename().string());
    std::sort(csvs.begin(), csvs.end());

    auto has = [&](const std::string& name) {
        return std::find(csvs.begin(), csvs.end(), name) != csvs.end();
    };
    auto stem_of = [](const std::string& name) { return name.substr(0, name.size() - 4); };

    std::vector<std::string> made;

    if (has("populations.csv")) {
        Table t = read_table(dir / "populations.csv");
        emit(dir, "populations.svg", svg::render(series_heatmap(t, "Site populations", "site")),
             made);
    }
    if (has("counts.csv")) {
        Table t = read_table(dir / "counts.csv");
        svg::LineChart ch;
        ch.title = "Region particle numbers";
        ch.x_label = "time";
        ch.y_label = "particles";
        for (std::size_t c = 1; c < t.header.size(); ++c) {
            if (t.header[c] == "current" || t.header[c] == "delta_n") continue;
            ch.series.push_back(column_series(t, 0, static_cast<int>(c), t.header[c]));
        }
        emit(dir, "counts.svg", svg::render(ch), made);
    }
    if (has("transport.csv")) {
        Table t = read_table(dir / "transport.csv");
        {
            svg::LineChart ch;
            ch.title = "Imbalance decay";
            ch.x_label = "time";
            ch.y_label = "z";
            ch.series.push_back(column_series(t, 0, t.col("z"), "z"));
            emit(dir, "transport_z.svg", svg::render(ch), made);
        }
        {
            svg::LineChart ch;
            ch.title = "Contact current";
            ch.x_label = "time";
            ch.y_label = "current";
            ch.series.push_back(column_series(t, 0, t.col("current"), "current"));
            emit(dir, "transport_current.svg", svg::render(ch), made);
        }
    }
    if (has("lyapunov.csv")) {
        Table t = read_table(dir / "lyapunov.csv");
        const int lc = t.col("lambda");
        std::vector<double> lam;
        for (std::size_t r = 0; r < t.rows(); ++r) lam.push_back(t.num(r, lc));
        std::sort(lam.begin(), lam.end());
        svg::LineChart ch;
        ch.title = "Maximal exponents across the ensemble";
        ch.x_label = "trajectory quantile";
        ch.y_label = "lambda";
        svg::Series s;
        s.label = "lambda (sorted)";
        for (std::size_t i = 0; i < lam.size(); ++i) {
            s.x.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(lam.size()));
            s.y.push_back(lam[i]);
        }
        ch.series.push_back(std::move(s));
        emit(dir, "lyapunov.svg", svg::render(ch), made);
    }
    if (has("refit.csv")) {
        Table t = read_table(dir / "refit.csv");
        const int rc = t.col("region");
        std::vector<std::string> regions;
        for (std::size_t r = 0; r < t.rows(); ++r)
            if (std::find(regions.begin(), regions.end(), t.cells[r][rc]) == regions.end())
                regions.push_back(t.cells[r][rc]);
        auto per_region = [&](const std::string& column, const std::string& title,
                              const std::string& file) {
            svg::LineChart ch;
            ch.title = title;
            ch.x_label = "time";
            ch.y_label = column;
            ch.markers = true;
            const int cc = t.col(column);
            for (const std::string& reg : regions) {
                svg::Series s;
                s.label = reg;
                for (std::size_t r = 0; r < t.rows(); ++r)
                    if (t.cells[r][rc] == reg) {
                        s.x.push_back(t.num(r, 0));
                        s.y.push_back(t.num(r, cc));
                    }
                ch.series.push_back(std::move(s));
            }
            emit(dir, file, svg::render(ch), made);
        };
        per_region("beta", "Refitted inverse temperature", "refit_beta.svg");
        per_region("mu", "Refitted chemical potential", "refit_mu.svg");
    }
    if (has("sweep.csv")) {
        Table t = read_table(dir / "sweep.csv");
        const int lm = t.col("lambda_mean");
        const int ls = t.col("lambda_sem");
        auto lambda_chart = [&](int xc, const std::string& x_label, const std::string& file) {
            svg::LineChart ch;
            ch.title = "Mean maximal exponent";
            ch.x_label = x_label;
            ch.y_label = "lambda";
            ch.markers = true;
            svg::Series s;
            s.label = "lambda";
            for (std::size_t r = 0; r < t.rows(); ++r) {
                s.x.push_back(t.num(r, xc));
                s.y.push_back(t.num(r, lm));
                s.y_err.push_back(t.num(r, ls));
            }
            ch.series.push_back(std::move(s));
            emit(dir, file, svg::render(ch), made);
        };
        lambda_chart(0, t.header[0], "sweep_lambda.svg");
        lambda_chart(t.col("e_kin"), "kinetic energy per site", "sweep_energy.svg");
    }

    // grouped families --------------------------------------------------------
    std::map<std::string, std::vector<std::string>> spdm_groups;   // basis_region -> files
    std::map<std::string, std::vector<std::string>> hist_groups;   // component -> files
    for (const std::string& name : csvs) {
        const std::string stem = stem_of(name);
        if (name.rfind("bloch_diag_", 0) == 0) {
            Table t = read_table(dir / name);
            emit(dir, stem + ".svg",
                 svg::render(series_heatmap(t, "Mode occupations: " + stem.substr(11), "mode k")),
                 made);
        } else if (name.rfind("spdm_", 0) == 0) {
            const std::size_t tpos = stem.rfind("_t");
            if (tpos != std::string::npos) spdm_groups[stem.substr(5, tpos - 5)].push_back(name);
        } else if (name.rfind("histogram_", 0) == 0) {
            const std::size_t tpos = stem.rfind("_t");
            if (tpos != std::string::npos) hist_groups[stem.substr(10, tpos - 10)].push_back(name);
        }
    }
    for (const auto& [key, files] : spdm_groups) {
        const std::string basis = key.substr(0, key.find('_'));
        const std::string region = key.substr(key.find('_') + 1);
        const std::string axis = basis == "bloch" ? "mode k" : "site";
        svg::LineChart diag;
        diag.title = "Density profile: " + region + " (" + basis + ")";
        diag.x_label = axis;
        diag.y_label = "occupation";
        diag.markers = true;
        std::vector<std::pair<double, std::string>> ordered;
        for (const std::string& f : files) {
            const std::string stem = stem_of(f);
            ordered.emplace_back(tag_to_time(stem.substr(stem.rfind("_t") + 2)), f);
        }
        std::sort(ordered.begin(), ordered.end());
        for (const auto& [time, f] : ordered) {
            Table t = read_table(dir / f);
            const int ic = t.col("i"), jc = t.col("j"), re = t.col("re"), sc_ = t.col("sem");
            svg::Series s;
            s.label = "t = " + fmt_num(time);
            int n = 0;
            for (std::size_t r = 0; r < t.rows(); ++r)
                n = std::max(n, static_cast<int>(t.num(r, ic)) + 1);
            svg::Heatmap hm;
            hm.title = "|rho|: " + region + " (" + basis + "), t = " + fmt_num(time);
            hm.x_label = axis;
            hm.y_label = axis;
            hm.values.assign(n, std::vector<double>(n, 0.0));
            const int ac = t.col("abs");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                const int i = static_cast<int>(t.num(r, ic));
                const int jj = static_cast<int>(t.num(r, jc));
                hm.values[i][jj] = t.num(r, ac);
                if (i == jj) {
                    s.x.push_back(i);
                    s.y.push_back(t.num(r, re));
                    s.y_err.push_back(t.num(r, sc_));
                }
            }
            hm.x0 = -0.5;
            hm.x1 = n - 0.5;
            hm.y0 = -0.5;
            hm.y1 = n - 0.5;
            emit(dir, stem_of(f) + ".svg", svg::render(hm), made);
            diag.series.push_back(std::move(s));
        }
        emit(dir, "spdm_" + key + "_diag.svg", svg::render(diag), made);
    }
    for (const auto& [component, files] : hist_groups) {
        svg::LineChart ch;
        ch.title = "Energy distribution (" + component + ")";
        ch.x_label = "energy per site";
        ch.y_label = "probability density";
        std::vector<std::pair<double, std::string>> ordered;
        for (const std::string& f : files) {
            const std::string stem = stem_of(f);
            ordered.emplace_back(tag_to_time(stem.substr(stem.rfind("_t") + 2)), f);
        }
        std::sort(ordered.begin(), ordered.end());
        for (const auto& [time, f] : ordered) {
            Table t = read_table(dir / f);
            const int lo = t.col("bin_lo"), hi = t.col("bin_hi"), dc = t.col("density");
            svg::Series s;
            s.label = "t = " + fmt_num(time);
            for (std::size_t r = 0; r < t.rows(); ++r) {
                s.x.push_back(0.5 * (t.num(r, lo) + t.num(r, hi)));
                s.y.push_back(t.num(r, dc));
            }
            ch.series.push_back(std::move(s));
        }
        emit(dir, "histogram_" + component + ".svg", svg::render(ch), made);
    }

    if (made.empty())
        throw std::runtime_error(
            dir_in +
            " holds no recognized tables; expected populations.csv, counts.csv, transport.csv, "
            "lyapunov.csv, sweep.csv, refit.csv, bloch_diag_*.csv, spdm_*.csv, or histogram_*.csv");
}

}  // namespace bhpc
