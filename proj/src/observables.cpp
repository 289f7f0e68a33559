#include "bhpc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhpc/stats.hpp"

namespace bhpc {

namespace {

Eigen::MatrixXcd region_block(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph,
                              Region region) {
    std::vector<int> sites = graph.region_sites(region);
    if (sites.empty()) throw std::invalid_argument("empty region");
    Eigen::MatrixXcd block(sites.size(), snapshot.cols());
    for (size_t r = 0; r < sites.size(); ++r) block.row(r) = snapshot.row(sites[r]);
    return block;
}

Spdm spdm_of_block(const Eigen::MatrixXcd& block, SpdmBasis basis, Region region, double time) {
    const int n = static_cast<int>(block.cols());
    Spdm out;
    out.basis = basis;
    out.region = region;
    out.time = time;
    out.n_traj = n;
    out.rho = (block.conjugate() * block.transpose()) / static_cast<double>(n);
    Eigen::MatrixXd p = block.cwiseAbs2();
    // Second moment of the per-trajectory entries; |x| variance bound gives the
    // magnitude standard error of the mean.
    Eigen::MatrixXd m2 = (p * p.transpose()) / static_cast<double>(n);
    Eigen::MatrixXd var = (m2 - out.rho.cwiseAbs2()).cwiseMax(0.0);
    out.sem = (var / std::max(1, n - 1)).cwiseSqrt();
    return out;
}

void require_ring_region(const SiteGraph& graph, Region region) {
    if (region == Region::Chain)
        throw std::invalid_argument("Bloch analysis needs a ring region, not the chain");
    if (graph.region_sites(region).size() < 3)
        throw std::invalid_argument("Bloch analysis: region too small to be a ring");
}

}  // namespace

Spdm spdm(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region, double time) {
    return spdm_of_block(region_block(snapshot, graph, region), SpdmBasis::Wannier, region, time);
}

Spdm spdm_bloch(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region,
                double time) {
    require_ring_region(graph, region);
    Eigen::MatrixXcd block = region_block(snapshot, graph, region);
    Eigen::MatrixXcd modes = dft_matrix(static_cast<int>(block.rows())).adjoint() * block;
    return spdm_of_block(modes, SpdmBasis::Bloch, region, time);
}

Spdm to_bloch(const Spdm& wannier) {
    if (wannier.basis != SpdmBasis::Wannier)
        throw std::invalid_argument("to_bloch: input already in the Bloch basis");
    const int m = static_cast<int>(wannier.rho.rows());
    if (m < 3) throw std::invalid_argument("to_bloch: region too small to be a ring");
    Eigen::MatrixXcd f = dft_matrix(m);
    Spdm out = wannier;
    out.basis = SpdmBasis::Bloch;
    // b = F^H a, so rho_B[k,k'] = <conj(b_k) b_k'> = (F^T rho_W conj(F))[k,k'].
    out.rho = f.transpose() * wannier.rho * f.conjugate();
    out.sem = Eigen::MatrixXd();  // error bars do not transform entrywise
    return out;
}

SitePopulations populations_and_counts(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph) {
    if (snapshot.rows() != graph.n_sites)
        throw std::invalid_argument("populations_and_counts: snapshot size mismatch");
    const int n = static_cast<int>(snapshot.cols());
    const int m = graph.n_sites;
    Eigen::MatrixXd p = snapshot.cwiseAbs2();
    SitePopulations out;
    out.n_site.resize(m);
    out.n_sem.resize(m);
    for (int l = 0; l < m; ++l) {
        double mean = pairwise_sum(0, static_cast<size_t>(n),
                                   [&](size_t t) { return p(l, static_cast<int>(t)); }) / n;
        double ss = pairwise_sum(0, static_cast<size_t>(n), [&](size_t t) {
            double d = p(l, static_cast<int>(t)) - mean;
            return d * d;
        });
        out.n_site[l] = mean;
        out.n_sem[l] = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (n - 1))) : 0.0;
    }
    for (const auto& [region, sites] : graph.regions) {
        double sum = 0.0;
        for (int s : sites) sum += out.n_site[s];
        out.counts[region] = sum;
    }
    out.total = out.n_site.sum();
    return out;
}

double bond_current(const Eigen::MatrixXcd& snapshot, const Bond& bond) {
    const int n = static_cast<int>(snapshot.cols());
    double mean_im = pairwise_sum(0, static_cast<size_t>(n), [&](size_t t) {
        auto c = static_cast<int>(t);
        return (std::conj(snapshot(bond.i, c)) * snapshot(bond.j, c)).imag();
    }) / n;
    return bond.hop * mean_im;
}

double bond_current(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, int i, int j) {
    for (const auto& b : graph.bonds) {
        if (b.i == i && b.j == j) return bond_current(snapshot, b);
        if (b.i == j && b.j == i) return -bond_current(snapshot, b);
    }
    throw std::invalid_argument("bond_current: no such bond in the graph");
}

TransportFit transport_fit(const TransportRecord& rec, double t_start, double t_end) {
    if (rec.times.empty()) throw std::invalid_argument("transport_fit: empty record");
    std::vector<double> xs, ys;
    const double d0 = rec.delta_n.front();
    if (!(d0 > 0.0)) throw std::invalid_argument("transport_fit: delta_n(0) must be positive");
    for (size_t i = 0; i < rec.times.size(); ++i) {
        double t = rec.times[i];
        if (t < t_start || t > t_end) continue;
        if (!(rec.delta_n[i] > 0.0))
            throw std::invalid_argument(
                "transport_fit: delta_n changes sign inside the window; shrink the window");
        xs.push_back(t);
        ys.push_back(std::log(rec.delta_n[i] / d0));
    }
    if (xs.size() < 3) throw std::invalid_argument("transport_fit: window has too few samples");
    LinearFit fit = linear_fit(xs, ys);
    TransportFit out;
    out.s = -fit.slope;
    out.z_slope = 2.0 * fit.slope / rec.m;
    out.r2 = fit.r2;
    out.t_start = xs.front();
    out.t_end = xs.back();
    return out;
}

GammaExtraction extract_gamma(const TransportRecord& rec, double j_hop, double t_start,
                              double t_end) {
    std::vector<double> ratios;
    for (size_t i = 0; i < rec.times.size(); ++i) {
        double t = rec.times[i];
        if (t < t_start || t > t_end) continue;
        double dn = (rec.n_left[i] - rec.n_right[i]) / rec.m;  // density difference
        if (!(dn > 0.0))
            throw std::invalid_argument("extract_gamma: density difference must stay positive");
        ratios.push_back(2.0 * rec.current[i] / dn);
    }
    if (ratios.empty()) throw std::invalid_argument("extract_gamma: empty window");
    GammaExtraction out;
    out.kappa = mean_sem(ratios).mean;
    out.epsilon = rec.epsilon;
    const double j2 = j_hop * j_hop;
    if (!(out.kappa > 0.0)) throw std::invalid_argument("extract_gamma: nonpositive kappa");
    double disc = j2 * j2 - 4.0 * out.kappa * out.kappa * j2;
    if (disc < 0.0)
        throw std::invalid_argument(
            "extract_gamma: kappa exceeds J/2, outside the Markovian-model regime");
    // Smaller root of kappa (J^2 + G^2) = J^2 G; the physical branch G ~ eps^2 << J.
    out.gamma_big = (j2 - std::sqrt(disc)) / (2.0 * out.kappa);
    out.gamma_rate = rec.epsilon * rec.epsilon / out.gamma_big;
    return out;
}

std::pair<double, double> default_fit_window(const TransportRecord& rec) {
    size_t n = rec.times.size();
    if (n < 4) throw std::invalid_argument("default_fit_window: record too short");
    double plateau = 0.0;
    size_t half = n / 2;
    for (size_t i = half; i < n; ++i) plateau += rec.n_chain[i];
    plateau /= static_cast<double>(n - half);
    double t_start = rec.times.back();
    for (size_t i = 0; i < n; ++i) {
        if (rec.n_chain[i] >= 0.9 * plateau) {
            t_start = rec.times[i];
            break;
        }
    }
    double t_end = rec.times.back();
    for (size_t i = 0; i < n; ++i) {
        if (!(rec.delta_n[i] > 0.0)) {
            t_end = rec.times[i - 1];
            break;
        }
    }
    return {t_start, t_end};
}

std::pair<double, double> be_deviation(const Eigen::VectorXd& rho_diag, const ThermalPoint& pt,
                                       bool shifted) {
    Eigen::VectorXd ref = mode_occupations(pt, shifted);
    if (ref.size() != rho_diag.size())
        throw std::invalid_argument("be_deviation: mode count mismatch");
    double max_dev = 0.0, max_rel = 0.0;
    for (int k = 0; k < ref.size(); ++k) {
        double dev = std::abs(rho_diag[k] - ref[k]);
        max_dev = std::max(max_dev, dev);
        max_rel = std::max(max_rel, dev / ref[k]);
    }
    return {max_dev, max_rel};
}

RefitResult be_refit(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region) {
    Spdm bloch = spdm_bloch(snapshot, graph, region);
    const int m = static_cast<int>(bloch.rho.rows());
    Eigen::VectorXd diag = bloch.rho.diagonal().real();
    double n_bar = diag.sum() / m;
    double e_bar = 0.0;
    for (int k = 0; k < m; ++k) e_bar += dispersion(k, m, graph.j_hop) * diag[k];
    e_bar /= m;
    RefitResult out;
    out.point = solve_beta_mu(n_bar, e_bar, m, graph.j_hop);
    std::tie(out.max_dev, out.max_rel_dev) = be_deviation(diag, out.point);
    return out;
}

Histogram energy_histogram(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph,
                           EnergyComponent component, int bins, double lo, double hi) {
    if (bins < 1) throw std::invalid_argument("energy_histogram: need at least one bin");
    const int n = static_cast<int>(snapshot.cols());
    Histogram out;
    out.values.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        EnergyBreakdown e = classical_energy(graph, snapshot.col(t));
        double v = component == EnergyComponent::Total      ? e.total
                   : component == EnergyComponent::Kinetic  ? e.kinetic
                                                            : e.potential;
        out.values.push_back(v / graph.n_sites);
    }
    MeanSem ms = mean_sem(out.values);
    out.mean = ms.mean;
    out.sem = ms.sem;
    if (!(lo < hi)) {
        lo = *std::min_element(out.values.begin(), out.values.end());
        hi = *std::max_element(out.values.begin(), out.values.end());
        if (lo == hi) hi = lo + 1.0;            // degenerate spread
        double pad = 1e-9 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    out.edges.resize(static_cast<size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        out.edges[static_cast<size_t>(b)] = lo + (hi - lo) * b / bins;
    out.counts.assign(static_cast<size_t>(bins), 0);
    for (double v : out.values) {
        if (v < lo || v > hi) continue;
        int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
        ++out.counts[static_cast<size_t>(b)];
    }
    return out;
}

}  // namespace bhpc
