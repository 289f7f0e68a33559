#include "bhpc/thermal.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bhpc/rng.hpp"
#include "bhpc/stats.hpp"

namespace bhpc {

double dispersion(int k, int m, double j_hop) {
    if (m <= 0) throw std::invalid_argument("dispersion: ring size must be positive");
    if (k < 0 || k >= m) throw std::invalid_argument("dispersion: mode index out of range");
    return -j_hop * std::cos(2.0 * M_PI * k / m);
}

double be_occupation(double e, double beta, double mu) {
    if (!(beta > 0.0)) throw std::invalid_argument("be_occupation: beta must be positive");
    if (!(mu < e)) throw std::invalid_argument("be_occupation: requires mu < E");
    return 1.0 / std::expm1(beta * (e - mu));
}

BeMoments be_moments(double beta, double mu, int m, double j_hop) {
    BeMoments out;
    // Pairwise sums keep the k-ordering fixed and the rounding reproducible.
    out.n_bar = pairwise_sum(0, static_cast<size_t>(m), [&](size_t k) {
                    return be_occupation(dispersion(static_cast<int>(k), m, j_hop), beta, mu);
                }) / m;
    out.e_bar = pairwise_sum(0, static_cast<size_t>(m), [&](size_t k) {
                    double e = dispersion(static_cast<int>(k), m, j_hop);
                    return e * be_occupation(e, beta, mu);
                }) / m;
    return out;
}

namespace {

// Occupation sums parametrized by the gap to the band bottom,
//   E_k - mu = 2 J sin^2(pi k / M) + delta,   delta = -J - mu > 0.
// Forming mu = -J - delta as a double and subtracting would lose delta to
// cancellation once delta ~ ulp(J); the gap form stays accurate down to
// delta ~ 1e-10 J, which the deep-condensate end of the bracket needs.
BeMoments moments_at_gap(double beta, double delta, int m, double j_hop) {
    BeMoments out;
    auto occ = [&](size_t k) {
        double sk = std::sin(M_PI * static_cast<double>(k) / m);
        return 1.0 / std::expm1(beta * (2.0 * j_hop * sk * sk + delta));
    };
    out.n_bar = pairwise_sum(0, static_cast<size_t>(m), occ) / m;
    out.e_bar = pairwise_sum(0, static_cast<size_t>(m), [&](size_t k) {
                    return dispersion(static_cast<int>(k), m, j_hop) * occ(k);
                }) / m;
    return out;
}

// n_bar is strictly decreasing in x under delta = exp(x).
double density_at(double x, double beta, int m, double j_hop) {
    return moments_at_gap(beta, std::exp(x), m, j_hop).n_bar;
}

}  // namespace

double solve_mu(double beta, double n_target, int m, double j_hop) {
    if (!(beta > 0.0)) throw std::invalid_argument("solve_mu: beta must be positive");
    if (!(n_target > 0.0)) throw std::invalid_argument("solve_mu: density must be positive");
    double lo = std::log(1e-10 * j_hop), hi = std::log(1e26 * j_hop);
    if (density_at(lo, beta, m, j_hop) < n_target || density_at(hi, beta, m, j_hop) > n_target)
        throw std::runtime_error("solve_mu: target density outside bracket");
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
        x = 0.5 * (lo + hi);
        double n = density_at(x, beta, m, j_hop);
        if (std::abs(n - n_target) < 1e-12) break;
        (n > n_target ? lo : hi) = x;
    }
    if (std::abs(density_at(x, beta, m, j_hop) - n_target) > 1e-10)
        throw std::runtime_error("solve_mu: bisection failed to reach tolerance");
    return -j_hop - std::exp(x);
}

ThermalPoint solve_beta_mu(double n_target, double e_target, int m, double j_hop) {
    if (!(n_target > 0.0)) throw std::invalid_argument("solve_beta_mu: density must be positive");
    double e_min = -j_hop * n_target;
    if (!(e_target > e_min) || !(e_target < 0.0)) {
        std::ostringstream msg;
        msg << "solve_beta_mu: kinetic energy per site must lie in (" << e_min
            << ", 0) for a positive-temperature state; got " << e_target;
        throw std::invalid_argument(msg.str());
    }
    // e_bar at fixed n_bar is strictly decreasing in beta.
    double lo = std::log(1e-7), hi = std::log(1e5);
    auto energy_at = [&](double lb) {
        double beta = std::exp(lb);
        return be_moments(beta, solve_mu(beta, n_target, m, j_hop), m, j_hop).e_bar;
    };
    if (energy_at(lo) < e_target || energy_at(hi) > e_target)
        throw std::runtime_error("solve_beta_mu: energy target outside bracket");
    double lb = 0.0;
    for (int it = 0; it < 200; ++it) {
        lb = 0.5 * (lo + hi);
        double e = energy_at(lb);
        if (std::abs(e - e_target) < 1e-10) break;
        (e > e_target ? lo : hi) = lb;
    }
    ThermalPoint pt;
    pt.beta = std::exp(lb);
    pt.mu = solve_mu(pt.beta, n_target, m, j_hop);
    pt.m = m;
    auto mom = be_moments(pt.beta, pt.mu, m, j_hop);
    pt.n_bar = mom.n_bar;
    pt.e_bar = mom.e_bar;
    if (std::abs(pt.n_bar - n_target) > 1e-8 || std::abs(pt.e_bar - e_target) > 1e-8)
        throw std::runtime_error("solve_beta_mu: failed to reach tolerance");
    return pt;
}

ThermalPoint thermal_point(double beta, double n_target, int m, double j_hop) {
    if (beta == 0.0) return uniform_point(n_target, m);
    ThermalPoint pt;
    pt.beta = beta;
    pt.mu = solve_mu(beta, n_target, m, j_hop);
    pt.m = m;
    auto mom = be_moments(beta, pt.mu, m, j_hop);
    pt.n_bar = mom.n_bar;
    pt.e_bar = mom.e_bar;
    return pt;
}

ThermalPoint uniform_point(double n_target, int m) {
    if (!(n_target > 0.0)) throw std::invalid_argument("uniform_point: density must be positive");
    ThermalPoint pt;
    pt.beta = 0.0;
    pt.mu = -std::numeric_limits<double>::infinity();
    pt.n_bar = n_target;
    pt.e_bar = 0.0;  // sum of -cos over a full period vanishes
    pt.m = m;
    return pt;
}

Eigen::VectorXd mode_occupations(const ThermalPoint& point, bool shifted) {
    int m = point.m;
    if (m <= 0) throw std::invalid_argument("mode_occupations: invalid ring size");
    Eigen::VectorXd n(m);
    if (point.beta == 0.0) {
        n.setConstant(point.n_bar);
    } else {
        for (int k = 0; k < m; ++k)
            n[k] = be_occupation(dispersion(k, m), point.beta, point.mu);
    }
    if (shifted) {
        if (m % 2 != 0)
            throw std::invalid_argument("mode_occupations: half-zone shift needs even M");
        Eigen::VectorXd ns(m);
        for (int k = 0; k < m; ++k) ns[k] = n[(k - m / 2 + m) % m];
        return ns;
    }
    return n;
}

Eigen::MatrixXcd dft_matrix(int m) {
    Eigen::MatrixXcd f(m, m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (int l = 0; l < m; ++l)
        for (int k = 0; k < m; ++k) {
            double arg = 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(l) / m;
            f(l, k) = norm * std::complex<double>(std::cos(arg), std::sin(arg));
        }
    return f;
}

namespace {

// Fills columns [0, n_traj) of `block` rows [row0, row0+m) with ring samples.
// Stream ids are offset so distinct regions never share a stream.
void fill_ring_samples(Eigen::MatrixXcd& block, int row0, const ThermalPoint& point, bool shifted,
                       std::uint64_t seed, std::uint64_t stream_base) {
    const int m = point.m;
    const int n_traj = static_cast<int>(block.cols());
    Eigen::VectorXd n = mode_occupations(point, shifted);
    Eigen::VectorXd amp = n.cwiseSqrt();
    Eigen::MatrixXcd f = dft_matrix(m);
    Eigen::MatrixXcd b(m, n_traj);
    for (int t = 0; t < n_traj; ++t) {
        RngStream rng(seed, stream_base + static_cast<std::uint64_t>(t));
        for (int k = 0; k < m; ++k) {
            double phi = rng.phase();
            b(k, t) = amp[k] * std::complex<double>(std::cos(phi), std::sin(phi));
        }
    }
    block.middleRows(row0, m).noalias() = f * b;
}

}  // namespace

Ensemble sample_quantum_ensemble(const ThermalPoint& point, int n_traj, std::uint64_t seed,
                                 bool shifted) {
    if (n_traj < 1) throw std::invalid_argument("sample_quantum_ensemble: need n_traj >= 1");
    Ensemble ens;
    ens.seed = seed;
    ens.meta = {RegionInit{Region::Whole, point, shifted}};
    ens.states.setZero(point.m, n_traj);
    fill_ring_samples(ens.states, 0, point, shifted, seed,
                      static_cast<std::uint64_t>(Region::Whole) << 40);
    return ens;
}

Ensemble sample_layout_ensemble(const SiteGraph& graph, const std::vector<RegionInit>& inits,
                                int n_traj, std::uint64_t seed) {
    if (n_traj < 1) throw std::invalid_argument("sample_layout_ensemble: need n_traj >= 1");
    std::set<Region> covered;
    for (const auto& init : inits)
        if (!covered.insert(init.region).second)
            throw std::invalid_argument("sample_layout_ensemble: region initialized twice");
    Ensemble ens;
    ens.seed = seed;
    ens.meta = inits;
    ens.states.setZero(graph.n_sites, n_traj);
    for (const auto& init : inits) {
        std::vector<int> sites = graph.region_sites(init.region);
        if (!init.point) continue;  // empty region stays at zero amplitude
        if (init.region == Region::Chain)
            throw std::invalid_argument("sample_layout_ensemble: chain is a path, not a ring; "
                                        "thermal sampling applies to ring regions only");
        if (init.point->m != static_cast<int>(sites.size()))
            throw std::invalid_argument("sample_layout_ensemble: thermal point size "
                                        "does not match region " + region_name(init.region));
        // Ring regions are stored contiguously, so sampling writes one row block.
        for (size_t s = 1; s < sites.size(); ++s)
            if (sites[s] != sites[s - 1] + 1)
                throw std::invalid_argument("sample_layout_ensemble: region sites not contiguous");
        // Streams are partitioned by region id so regions never share a draw
        // and the result is independent of the init listing order.
        std::uint64_t stream_base = static_cast<std::uint64_t>(init.region) << 40;
        fill_ring_samples(ens.states, sites.front(), *init.point, init.shifted, seed, stream_base);
    }
    size_t total = 0;
    for (const auto& [r, sites] : graph.regions) total += sites.size();
    if (total != static_cast<size_t>(graph.n_sites))
        throw std::invalid_argument("sample_layout_ensemble: regions do not cover the layout");
    return ens;
}

}  // namespace bhpc
