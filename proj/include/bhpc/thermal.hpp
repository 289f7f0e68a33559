#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bhpc/lattice.hpp"

namespace bhpc {

/// Bose-Einstein state on an M-site ring. beta == 0 encodes the infinite-
/// temperature limit (uniform occupations n_k = n_bar, mu formally -inf).
struct ThermalPoint {
    double beta = 0.0;
    double mu = 0.0;
    double n_bar = 0.0;  ///< mean density, particles per site
    double e_bar = 0.0;  ///< mean kinetic energy per site
    int m = 0;           ///< ring size
};

/// Single-particle ring dispersion E_k = -J cos(2*pi*k/M).
double dispersion(int k, int m, double j_hop = 1.0);

/// n = 1/(exp(beta(E-mu)) - 1). Requires beta > 0 and mu < E.
double be_occupation(double e, double beta, double mu);

struct BeMoments {
    double n_bar = 0.0;
    double e_bar = 0.0;
};

/// Density and kinetic energy per site of the M discrete ring modes.
BeMoments be_moments(double beta, double mu, int m, double j_hop = 1.0);

/// Chemical potential with be_moments(beta, mu, m).n_bar = n_target to 1e-10.
/// Bisection on x with mu = -J - exp(x), which keeps mu < -J by construction.
double solve_mu(double beta, double n_target, int m, double j_hop = 1.0);

/// Solves (n_bar, e_bar) -> (beta, mu) to 1e-8; outer bisection on ln(beta),
/// inner solve_mu. e_target must lie in (-J*n_target, 0).
ThermalPoint solve_beta_mu(double n_target, double e_target, int m, double j_hop = 1.0);

/// ThermalPoint from (beta, n_bar): solves mu and fills the moments.
ThermalPoint thermal_point(double beta, double n_target, int m, double j_hop = 1.0);

/// Infinite-temperature point: uniform occupations, e_bar = 0 by symmetry.
ThermalPoint uniform_point(double n_target, int m);

/// Mode occupations n_k, k = 0..M-1. `shifted` translates the distribution by
/// half the Brillouin zone (negative-temperature ensemble); requires even M.
Eigen::VectorXd mode_occupations(const ThermalPoint& point, bool shifted = false);

/// Unitary DFT, F[l,k] = exp(i 2 pi k l / M) / sqrt(M); site amplitudes are
/// a = F b for Bloch amplitudes b.
Eigen::MatrixXcd dft_matrix(int m);

/// How one region of a layout is initialized.
struct RegionInit {
    Region region = Region::Whole;
    std::optional<ThermalPoint> point;  ///< empty (zero amplitudes) when absent
    bool shifted = false;
};

struct Ensemble {
    Eigen::MatrixXcd states;  ///< n_sites x n_traj; column t is trajectory t
    std::uint64_t seed = 0;
    std::vector<RegionInit> meta;
    int n_traj() const { return static_cast<int>(states.cols()); }
};

/// Samples the quantum ensemble on a single ring: per trajectory,
/// a_l = M^{-1/2} sum_k exp(i 2 pi k l / M) sqrt(n_k) exp(i phi_k) with
/// independent uniform phases phi_k. Trajectory t draws only from the RNG
/// stream (seed, t), so results do not depend on evaluation order.
Ensemble sample_quantum_ensemble(const ThermalPoint& point, int n_traj, std::uint64_t seed,
                                 bool shifted = false);

/// Samples each region of a layout independently (thermal rings or empty).
/// Thermal init is only valid on ring regions.
Ensemble sample_layout_ensemble(const SiteGraph& graph, const std::vector<RegionInit>& inits,
                                int n_traj, std::uint64_t seed);

}  // namespace bhpc
