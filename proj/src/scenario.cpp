#include "bhpc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "bhpc/lattice.hpp"

namespace bhpc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("scenario: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> ok) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(ok.begin(), ok.end(),
                         [&](const char* k) { return key == k; }) == ok.end())
            fail(path + "." + key, "unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required number");
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

int get_int_or(const json& obj, const std::string& path, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

bool get_bool_or(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_str_or(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

std::vector<double> get_num_list(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_array()) fail(path + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) fail(path + "." + key, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::string> get_str_list(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_array()) fail(path + "." + key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : obj[key]) {
        if (!v.is_string()) fail(path + "." + key, "expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

RegionStateSpec parse_region_state(const std::string& region, const json& v,
                                   const std::string& path) {
    RegionStateSpec st;
    st.region = region;
    if (v.is_string()) {
        if (v.get<std::string>() != "empty") fail(path, "only the string \"empty\" is allowed");
        st.empty = true;
        return st;
    }
    check_keys(v, path, {"beta", "mu", "n_bar", "e_bar", "shifted"});
    if (v.contains("beta")) st.beta = get_num(v, path, "beta");
    if (v.contains("mu")) st.mu = get_num(v, path, "mu");
    if (v.contains("n_bar")) st.n_bar = get_num(v, path, "n_bar");
    if (v.contains("e_bar")) st.e_bar = get_num(v, path, "e_bar");
    st.shifted = get_bool_or(v, path, "shifted", false);
    const bool bm = st.beta && st.mu && !st.n_bar && !st.e_bar;
    const bool bn = st.beta && st.n_bar && !st.mu && !st.e_bar;
    const bool ne = st.n_bar && st.e_bar && !st.beta && !st.mu;
    if (!bm && !bn && !ne)
        fail(path, "state must be \"empty\", {beta, mu}, {beta, n_bar}, or {n_bar, e_bar}");
    return st;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    const std::string root = "$";
    check_keys(doc, root,
               {"name", "mode", "layout", "physics", "init", "run", "analysis", "sweep"});
    Scenario sc;
    sc.name = get_str_or(doc, root, "name", "");
    if (sc.name.empty()) fail(root + ".name", "missing required string");
    sc.mode = get_str_or(doc, root, "mode", "evolve");
    if (sc.mode != "evolve" && sc.mode != "sweep")
        fail(root + ".mode", "expected \"evolve\" or \"sweep\"");

    if (sc.mode == "sweep") {
        if (!doc.contains("sweep")) fail(root + ".sweep", "missing required object");
        for (const char* k : {"layout", "physics", "init", "run", "analysis"})
            if (doc.contains(k)) fail(root + "." + std::string(k), "not allowed in sweep mode");
        const json& sw = doc["sweep"];
        const std::string p = root + ".sweep";
        check_keys(sw, p,
                   {"axis", "values", "m", "g", "beta", "n_bar", "e_target", "shifted",
                    "n_samples", "t_total", "tau_r", "dt", "seed"});
        SweepSpec s;
        s.axis = get_str_or(sw, p, "axis", "beta");
        s.values = get_num_list(sw, p, "values");
        s.m = get_int_or(sw, p, "m", 20);
        s.g = get_num_or(sw, p, "g", 0.4);
        s.beta = get_num_or(sw, p, "beta", 0.5);
        s.n_bar = get_num_or(sw, p, "n_bar", 1.0);
        s.e_target = get_num_or(sw, p, "e_target", -0.533);
        s.shifted = get_bool_or(sw, p, "shifted", false);
        s.n_samples = get_int_or(sw, p, "n_samples", 100);
        s.t_total = get_num_or(sw, p, "t_total", 1000.0);
        s.tau_r = get_num_or(sw, p, "tau_r", 1.0);
        s.dt = get_num_or(sw, p, "dt", 0.05);
        s.seed = static_cast<std::uint64_t>(get_num_or(sw, p, "seed", 0.0));
        sc.sweep = s;
        validate_scenario(sc);
        return sc;
    }

    if (doc.contains("sweep")) fail(root + ".sweep", "not allowed in evolve mode");
    if (!doc.contains("layout")) fail(root + ".layout", "missing required object");
    {
        const json& lay = doc["layout"];
        const std::string p = root + ".layout";
        check_keys(lay, p, {"kind", "m", "l", "epsilon"});
        sc.layout_kind = get_str_or(lay, p, "kind", "");
        sc.m = get_int_or(lay, p, "m", 20);
        sc.l = get_int_or(lay, p, "l", 0);
        sc.epsilon = get_num_or(lay, p, "epsilon", 0.0);
    }
    if (doc.contains("physics")) {
        const json& ph = doc["physics"];
        const std::string p = root + ".physics";
        check_keys(ph, p, {"j", "g", "g_chain"});
        sc.j = get_num_or(ph, p, "j", 1.0);
        sc.g = get_num_or(ph, p, "g", 0.4);
        sc.g_chain = get_num_or(ph, p, "g_chain", 0.0);
    }
    if (!doc.contains("init")) fail(root + ".init", "missing required object");
    {
        const json& init = doc["init"];
        if (!init.is_object()) fail(root + ".init", "expected an object keyed by region");
        for (const auto& [region, v] : init.items())
            sc.init.push_back(parse_region_state(region, v, root + ".init." + region));
        // nlohmann objects iterate alphabetically; keep a stable, layout-based
        // order instead (left to right).
        auto rank = [](const RegionStateSpec& r) {
            if (r.region == "left_ring") return 0;
            if (r.region == "chain") return 1;
            if (r.region == "right_ring") return 2;
            return 3;
        };
        std::stable_sort(sc.init.begin(), sc.init.end(),
                         [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    }
    if (!doc.contains("run")) fail(root + ".run", "missing required object");
    {
        const json& run = doc["run"];
        const std::string p = root + ".run";
        check_keys(run, p, {"dt", "t_final", "sample_every", "sample_times", "n_traj", "seed"});
        sc.dt = get_num_or(run, p, "dt", 0.05);
        sc.t_final = get_num_or(run, p, "t_final", 100.0);
        if (run.contains("sample_every")) sc.sample_every = get_num(run, p, "sample_every");
        sc.sample_times = get_num_list(run, p, "sample_times");
        sc.n_traj = get_int_or(run, p, "n_traj", 2048);
        sc.seed = static_cast<std::uint64_t>(get_num_or(run, p, "seed", 0.0));
    }
    if (doc.contains("analysis")) {
        const json& an = doc["analysis"];
        const std::string p = root + ".analysis";
        check_keys(an, p,
                   {"spdm", "bloch_series", "lyapunov", "transport", "histogram", "refit"});
        if (an.contains("spdm")) {
            const json& s = an["spdm"];
            const std::string q = p + ".spdm";
            check_keys(s, q, {"times", "bloch", "regions"});
            SpdmAnalysis out;
            out.times = get_num_list(s, q, "times");
            out.bloch = get_bool_or(s, q, "bloch", true);
            out.regions = get_str_list(s, q, "regions");
            sc.analysis.spdm = out;
        }
        if (an.contains("bloch_series")) {
            const json& s = an["bloch_series"];
            const std::string q = p + ".bloch_series";
            check_keys(s, q, {"regions"});
            BlochSeriesAnalysis out;
            out.regions = get_str_list(s, q, "regions");
            sc.analysis.bloch_series = out;
        }
        if (an.contains("lyapunov")) {
            const json& s = an["lyapunov"];
            const std::string q = p + ".lyapunov";
            check_keys(s, q, {"t_total", "tau_r", "n_traj"});
            LyapunovAnalysis out;
            out.t_total = get_num_or(s, q, "t_total", 2000.0);
            out.tau_r = get_num_or(s, q, "tau_r", 1.0);
            out.n_traj = get_int_or(s, q, "n_traj", 0);
            sc.analysis.lyapunov = out;
        }
        if (an.contains("transport")) {
            const json& s = an["transport"];
            const std::string q = p + ".transport";
            check_keys(s, q, {"window_start", "window_end"});
            TransportAnalysis out;
            if (s.contains("window_start")) out.window_start = get_num(s, q, "window_start");
            if (s.contains("window_end")) out.window_end = get_num(s, q, "window_end");
            sc.analysis.transport = out;
        }
        if (an.contains("histogram")) {
            const json& s = an["histogram"];
            const std::string q = p + ".histogram";
            check_keys(s, q, {"component", "bins", "times", "lo", "hi"});
            HistogramAnalysis out;
            out.component = get_str_or(s, q, "component", "total");
            out.bins = get_int_or(s, q, "bins", 61);
            if (s.contains("times")) out.times = get_num_list(s, q, "times");
            if (s.contains("lo")) out.lo = get_num(s, q, "lo");
            if (s.contains("hi")) out.hi = get_num(s, q, "hi");
            sc.analysis.histogram = out;
        }
        if (an.contains("refit")) {
            const json& s = an["refit"];
            const std::string q = p + ".refit";
            check_keys(s, q, {"times", "regions"});
            RefitAnalysis out;
            out.times = get_num_list(s, q, "times");
            out.regions = get_str_list(s, q, "regions");
            sc.analysis.refit = out;
        }
    }
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("scenario: " + path + " is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

namespace {

json region_state_json(const RegionStateSpec& st) {
    if (st.empty) return "empty";
    json out = json::object();
    if (st.beta) out["beta"] = *st.beta;
    if (st.mu) out["mu"] = *st.mu;
    if (st.n_bar) out["n_bar"] = *st.n_bar;
    if (st.e_bar) out["e_bar"] = *st.e_bar;
    if (st.shifted) out["shifted"] = true;
    return out;
}

}  // namespace

json to_json(const Scenario& sc) {
    json doc;
    doc["name"] = sc.name;
    doc["mode"] = sc.mode;
    if (sc.mode == "sweep") {
        const SweepSpec& s = *sc.sweep;
        doc["sweep"] = {{"axis", s.axis},         {"values", s.values},
                        {"m", s.m},               {"g", s.g},
                        {"beta", s.beta},         {"n_bar", s.n_bar},
                        {"e_target", s.e_target}, {"shifted", s.shifted},
                        {"n_samples", s.n_samples}, {"t_total", s.t_total},
                        {"tau_r", s.tau_r},       {"dt", s.dt},
                        {"seed", s.seed}};
        return doc;
    }
    doc["layout"] = {{"kind", sc.layout_kind}, {"m", sc.m}, {"l", sc.l}, {"epsilon", sc.epsilon}};
    doc["physics"] = {{"j", sc.j}, {"g", sc.g}, {"g_chain", sc.g_chain}};
    json init = json::object();
    for (const auto& st : sc.init) init[st.region] = region_state_json(st);
    doc["init"] = init;
    json run = {{"dt", sc.dt}, {"t_final", sc.t_final}, {"n_traj", sc.n_traj}, {"seed", sc.seed}};
    if (sc.sample_every) run["sample_every"] = *sc.sample_every;
    if (!sc.sample_times.empty()) run["sample_times"] = sc.sample_times;
    doc["run"] = run;
    json an = json::object();
    if (sc.analysis.spdm) {
        const auto& s = *sc.analysis.spdm;
        json o = {{"times", s.times}, {"bloch", s.bloch}};
        if (!s.regions.empty()) o["regions"] = s.regions;
        an["spdm"] = o;
    }
    if (sc.analysis.bloch_series) an["bloch_series"] = {{"regions", sc.analysis.bloch_series->regions}};
    if (sc.analysis.lyapunov) {
        const auto& s = *sc.analysis.lyapunov;
        an["lyapunov"] = {{"t_total", s.t_total}, {"tau_r", s.tau_r}, {"n_traj", s.n_traj}};
    }
    if (sc.analysis.transport) {
        json o = json::object();
        if (sc.analysis.transport->window_start) o["window_start"] = *sc.analysis.transport->window_start;
        if (sc.analysis.transport->window_end) o["window_end"] = *sc.analysis.transport->window_end;
        an["transport"] = o;
    }
    if (sc.analysis.histogram) {
        const auto& s = *sc.analysis.histogram;
        json o = {{"component", s.component}, {"bins", s.bins}, {"times", s.times}};
        if (s.lo) o["lo"] = *s.lo;
        if (s.hi) o["hi"] = *s.hi;
        an["histogram"] = o;
    }
    if (sc.analysis.refit) {
        const auto& s = *sc.analysis.refit;
        json o = {{"times", s.times}};
        if (!s.regions.empty()) o["regions"] = s.regions;
        an["refit"] = o;
    }
    if (!an.empty()) doc["analysis"] = an;
    return doc;
}

namespace {

std::vector<std::string> layout_regions(const std::string& kind) {
    if (kind == "ring") return {"whole"};
    if (kind == "two_rings_point") return {"left_ring", "right_ring"};
    if (kind == "two_rings_chain") return {"left_ring", "chain", "right_ring"};
    throw std::invalid_argument("scenario: $.layout.kind: expected ring, two_rings_point, or "
                                "two_rings_chain; got \"" + kind + "\"");
}

void check_region_names(const std::vector<std::string>& names,
                        const std::vector<std::string>& allowed, const std::string& path) {
    for (const auto& n : names)
        if (std::find(allowed.begin(), allowed.end(), n) == allowed.end())
            fail(path, "region \"" + n + "\" is not part of this layout");
}

}  // namespace

void validate_scenario(const Scenario& sc) {
    if (sc.mode == "sweep") {
        const SweepSpec& s = *sc.sweep;
        if (s.axis != "beta" && s.axis != "coupling" && s.axis != "ring_size")
            fail("$.sweep.axis", "expected beta, coupling, or ring_size");
        if (s.values.empty()) fail("$.sweep.values", "need at least one grid value");
        if (s.n_samples < 1) fail("$.sweep.n_samples", "need at least one sample");
        if (!(s.dt > 0.0) || !(s.t_total > 0.0) || !(s.tau_r > 0.0))
            fail("$.sweep", "dt, t_total, tau_r must be positive");
        return;
    }

    std::vector<std::string> regions = layout_regions(sc.layout_kind);
    if (sc.m < 3) fail("$.layout.m", "ring size must be at least 3");
    if (sc.layout_kind == "two_rings_chain" && sc.l < 0) fail("$.layout.l", "must be >= 0");
    if (sc.layout_kind != "ring" && !(sc.epsilon > 0.0))
        fail("$.layout.epsilon", "junction coupling must be positive");
    if (!(sc.j > 0.0)) fail("$.physics.j", "hopping must be positive");

    std::set<std::string> seen;
    for (const auto& st : sc.init) {
        if (std::find(regions.begin(), regions.end(), st.region) == regions.end())
            fail("$.init." + st.region, "region is not part of this layout");
        if (!seen.insert(st.region).second) fail("$.init." + st.region, "region listed twice");
        if (st.region == "chain" && !st.empty)
            fail("$.init.chain", "the chain starts empty (thermal sampling applies to rings)");
    }
    for (const auto& r : regions)
        if (!seen.count(r)) fail("$.init." + r, "missing initial state for this region");

    if (!(sc.dt > 0.0)) fail("$.run.dt", "time step must be positive");
    if (!(sc.t_final >= 0.0)) fail("$.run.t_final", "must be >= 0");
    if (sc.n_traj < 1) fail("$.run.n_traj", "need at least one trajectory");
    const bool has_every = sc.sample_every.has_value();
    const bool has_times = !sc.sample_times.empty();
    if (has_every == has_times)
        fail("$.run", "exactly one of sample_every / sample_times is required");
    if (has_every && !(*sc.sample_every > 0.0)) fail("$.run.sample_every", "must be positive");

    if (sc.analysis.spdm) {
        if (sc.analysis.spdm->times.empty()) fail("$.analysis.spdm.times", "need at least one time");
        check_region_names(sc.analysis.spdm->regions, regions, "$.analysis.spdm.regions");
    }
    if (sc.analysis.bloch_series) {
        if (sc.analysis.bloch_series->regions.empty())
            fail("$.analysis.bloch_series.regions", "need at least one region");
        check_region_names(sc.analysis.bloch_series->regions, regions,
                           "$.analysis.bloch_series.regions");
        for (const auto& r : sc.analysis.bloch_series->regions)
            if (r == "chain") fail("$.analysis.bloch_series.regions", "chain is not a ring");
    }
    if (sc.analysis.lyapunov) {
        const auto& s = *sc.analysis.lyapunov;
        if (!(s.t_total > 0.0) || !(s.tau_r > 0.0))
            fail("$.analysis.lyapunov", "t_total and tau_r must be positive");
        if (s.n_traj < 0 || s.n_traj > sc.n_traj)
            fail("$.analysis.lyapunov.n_traj", "must be in [0, run.n_traj]");
    }
    if (sc.analysis.transport) {
        if (sc.layout_kind != "two_rings_chain" && sc.layout_kind != "two_rings_point")
            fail("$.analysis.transport", "requires a two-ring layout");
        const auto& s = *sc.analysis.transport;
        if (s.window_start.has_value() != s.window_end.has_value())
            fail("$.analysis.transport", "window_start and window_end go together");
        if (s.window_start && !(*s.window_start < *s.window_end))
            fail("$.analysis.transport", "window_start must precede window_end");
    }
    if (sc.analysis.histogram) {
        const auto& s = *sc.analysis.histogram;
        if (s.component != "total" && s.component != "kinetic" && s.component != "potential")
            fail("$.analysis.histogram.component", "expected total, kinetic, or potential");
        if (s.bins < 1) fail("$.analysis.histogram.bins", "need at least one bin");
        if (s.times.empty()) fail("$.analysis.histogram.times", "need at least one time");
        if (s.lo.has_value() != s.hi.has_value())
            fail("$.analysis.histogram", "lo and hi go together");
    }
    if (sc.analysis.refit) {
        if (sc.analysis.refit->times.empty())
            fail("$.analysis.refit.times", "need at least one time");
        check_region_names(sc.analysis.refit->regions, regions, "$.analysis.refit.regions");
        for (const auto& r : sc.analysis.refit->regions)
            if (r == "chain") fail("$.analysis.refit.regions", "chain is not a ring");
    }
}

namespace {

RegionStateSpec state_beta_mu(std::string region, double beta, double mu) {
    RegionStateSpec st;
    st.region = std::move(region);
    st.beta = beta;
    st.mu = mu;
    return st;
}

RegionStateSpec state_beta_n(std::string region, double beta, double n_bar) {
    RegionStateSpec st;
    st.region = std::move(region);
    st.beta = beta;
    st.n_bar = n_bar;
    return st;
}

RegionStateSpec state_empty(std::string region) {
    RegionStateSpec st;
    st.region = std::move(region);
    st.empty = true;
    return st;
}

HistogramAnalysis histogram_of(std::string component, std::vector<double> times) {
    HistogramAnalysis h;
    h.component = std::move(component);
    h.bins = 61;
    h.times = std::move(times);
    return h;
}

}  // namespace

Scenario builtin_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    if (name == "relax") {
        // One ring sampled from its thermal quantum ensemble; self-thermalizes.
        sc.layout_kind = "ring";
        sc.m = 20;
        sc.g = 0.4;
        sc.init = {state_beta_n("whole", 2.0, 1.0)};
        sc.dt = 0.05;
        sc.t_final = 100.0;
        sc.sample_every = 1.0;
        sc.n_traj = 2048;
        sc.analysis.spdm = SpdmAnalysis{{0.0, 10.0, 100.0}, true, {}};
        sc.analysis.lyapunov = LyapunovAnalysis{2000.0, 1.0, 0};
        sc.analysis.histogram = histogram_of("total", {0.0});
    } else if (name == "equilibrate") {
        // Two point-coupled rings prepared at unequal temperatures.
        sc.layout_kind = "two_rings_point";
        sc.m = 20;
        sc.epsilon = 0.25;
        sc.g = 0.4;
        sc.init = {state_beta_mu("left_ring", 2.0, -1.07),
                   state_beta_mu("right_ring", 0.2, -3.63)};
        sc.dt = 0.05;
        sc.t_final = 200.0;
        sc.sample_every = 1.0;
        sc.n_traj = 2048;
        sc.analysis.spdm = SpdmAnalysis{{0.0, 200.0}, true, {"left_ring", "right_ring"}};
        sc.analysis.bloch_series = BlochSeriesAnalysis{{"left_ring", "right_ring"}};
        sc.analysis.refit = RefitAnalysis{{200.0}, {"left_ring", "right_ring"}};
    } else if (name == "transport") {
        // Two warm rings bridged by an initially empty non-interacting chain.
        sc.layout_kind = "two_rings_chain";
        sc.m = 40;
        sc.l = 3;
        sc.epsilon = 0.1;
        sc.g = 0.4;
        sc.g_chain = 0.0;
        sc.init = {state_beta_n("left_ring", 0.2, 1.0), state_empty("chain"),
                   state_beta_n("right_ring", 0.2, 0.5)};
        sc.dt = 0.05;
        sc.t_final = 200.0;
        sc.sample_every = 1.0;
        sc.n_traj = 2048;
        sc.analysis.transport = TransportAnalysis{};
        sc.analysis.spdm = SpdmAnalysis{{0.0, 200.0}, true, {"left_ring", "right_ring"}};
    } else if (name == "sweep") {
        // Mean maximal exponent across an inverse-temperature grid.
        sc.mode = "sweep";
        SweepSpec s;
        s.axis = "beta";
        for (int i = 0; i <= 10; ++i) s.values.push_back(0.2 * i);
        s.m = 20;
        s.g = 0.4;
        s.n_bar = 1.0;
        s.n_samples = 100;
        s.t_total = 1000.0;
        s.tau_r = 1.0;
        s.dt = 0.05;
        sc.sweep = s;
    } else if (name == "refit") {
        // Strong coupling: steady state deviates from the seeded thermal
        // curve; an adjusted (beta, mu) fit absorbs the shift.
        sc.layout_kind = "ring";
        sc.m = 20;
        sc.g = 0.8;
        sc.init = {state_beta_mu("whole", 0.2, -3.6125)};
        sc.dt = 0.05;
        sc.t_final = 100.0;
        sc.sample_every = 1.0;
        sc.n_traj = 2048;
        sc.analysis.spdm = SpdmAnalysis{{0.0, 100.0}, true, {}};
        sc.analysis.histogram = histogram_of("potential", {0.0, 100.0});
        sc.analysis.refit = RefitAnalysis{{0.0, 100.0}, {}};
        sc.analysis.lyapunov = LyapunovAnalysis{2000.0, 1.0, 0};
    } else {
        throw std::invalid_argument("unknown built-in scenario \"" + name +
                                    "\"; available: relax, equilibrate, transport, sweep, refit");
    }
    validate_scenario(sc);
    return sc;
}

std::vector<std::string> builtin_names() {
    return {"relax", "equilibrate", "transport", "sweep", "refit"};
}

}  // namespace bhpc
