#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "bhpc/lattice.hpp"
#include "bhpc/thermal.hpp"

namespace bhpc {

enum class SpdmBasis { Wannier, Bloch };

/// Single-particle density matrix of a region: rho[l,l'] = <conj(a_l) a_l'>
/// averaged over trajectories (columns of a snapshot).
struct Spdm {
    Eigen::MatrixXcd rho;
    Eigen::MatrixXd sem;  ///< entrywise standard error of the (complex) mean's magnitude
    SpdmBasis basis = SpdmBasis::Wannier;
    double time = 0.0;
    int n_traj = 0;
    Region region = Region::Whole;
};

Spdm spdm(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region,
          double time = 0.0);

/// SPDM directly in the Bloch basis of a ring region (computed from the
/// DFT-transformed snapshot, so the error bars are native to that basis).
Spdm spdm_bloch(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region,
                double time = 0.0);

/// Conjugates a Wannier SPDM of a ring region by the unitary DFT. Exact on the
/// matrix; the error bars are basis-dependent and left empty here (use
/// spdm_bloch when they are needed).
Spdm to_bloch(const Spdm& wannier);

struct SitePopulations {
    Eigen::VectorXd n_site;  ///< <|a_l|^2> per site
    Eigen::VectorXd n_sem;
    std::map<Region, double> counts;  ///< region particle numbers
    double total = 0.0;
};

SitePopulations populations_and_counts(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph);

/// Ensemble-averaged bond current j_{i->j} = hop * <Im(conj(a_i) a_j)>.
/// Positive j drains site i: dn_i/dt = -j within the continuity relation.
double bond_current(const Eigen::MatrixXcd& snapshot, const Bond& bond);
double bond_current(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, int i, int j);

/// Time series of the boundary-driven two-ring experiment.
struct TransportRecord {
    std::vector<double> times;
    std::vector<double> n_left, n_right, n_chain;  ///< region particle numbers
    std::vector<double> delta_n;                   ///< N_L - N_R
    std::vector<double> z;                         ///< (2/M) ln(delta_n / delta_n(0))
    std::vector<double> current;                   ///< chain current (mean over chain bonds)
    int m = 0;                                     ///< ring size
    double j_hop = 1.0;
    double epsilon = 0.0;                          ///< junction hop
};

struct TransportFit {
    double s = 0.0;       ///< decay rate: delta_n ~ exp(-s t) over the window
    double z_slope = 0.0; ///< slope of z(t) = -2 s / m
    double r2 = 0.0;
    double t_start = 0.0, t_end = 0.0;
};

/// Least-squares fit of ln(delta_n) over [t_start, t_end]. Rejects windows
/// where delta_n changes sign (equilibration finished; shrink the window).
TransportFit transport_fit(const TransportRecord& rec, double t_start, double t_end);

struct GammaExtraction {
    double kappa = 0.0;       ///< window mean of 2 j / (n_l - n_r)
    double gamma_big = 0.0;   ///< reservoir rate: smaller root of kappa (J^2+G^2) = J^2 G
    double gamma_rate = 0.0;  ///< self-thermalization rate epsilon^2 / gamma_big
    double epsilon = 0.0;
};

GammaExtraction extract_gamma(const TransportRecord& rec, double j_hop, double t_start,
                              double t_end);

/// Default quasi-stationary window: starts when the chain population first
/// reaches 90% of its plateau (mean over the second half of the series).
std::pair<double, double> default_fit_window(const TransportRecord& rec);

struct RefitResult {
    ThermalPoint point;      ///< (beta', mu') solved from the measured (n, e_k)
    double max_dev = 0.0;    ///< max_k |rho_kk - n_k(beta', mu')|
    double max_rel_dev = 0.0;
};

/// Refits a Bose-Einstein distribution to the Bloch diagonal of a ring region
/// (density and kinetic energy matched through the two-parameter solver).
RefitResult be_refit(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph, Region region);

/// (max_dev, max_rel_dev) of a measured Bloch diagonal against a thermal point.
std::pair<double, double> be_deviation(const Eigen::VectorXd& rho_diag, const ThermalPoint& pt,
                                       bool shifted = false);

enum class EnergyComponent { Total, Kinetic, Potential };

struct Histogram {
    std::vector<double> edges;   ///< bins+1 ascending edges
    std::vector<int> counts;
    std::vector<double> values;  ///< the per-trajectory values that were binned
    double mean = 0.0;
    double sem = 0.0;
};

/// Per-trajectory energy per site, binned. lo >= hi requests automatic range.
Histogram energy_histogram(const Eigen::MatrixXcd& snapshot, const SiteGraph& graph,
                           EnergyComponent component, int bins = 50, double lo = 0.0,
                           double hi = 0.0);

}  // namespace bhpc
