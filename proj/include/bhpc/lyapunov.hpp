#pragma once

#include <cstdint>
#include <vector>

#include "bhpc/dynamics.hpp"
#include "bhpc/lattice.hpp"

namespace bhpc {

/// Linearized flow: d(delta)/dt = -i [h delta + g (2|a|^2 delta + a^2 conj(delta))].
FieldState tangent_rhs(const SiteGraph& graph, const FieldState& state, const FieldState& tangent);

/// Unit-norm complex Gaussian tangent, orthogonalized (real inner product)
/// against the neutral global-phase direction i*state.
FieldState random_tangent(const FieldState& state, std::uint64_t seed, std::uint64_t stream);

struct LyapunovResult {
    double lambda = 0.0;
    std::vector<double> diag_times;      ///< renormalization times
    std::vector<double> running_lambda;  ///< running estimate, for convergence checks
};

/// Benettin estimate of the maximal exponent of one trajectory: tangent
/// renormalized every tau_r, lambda = (sum of log growths) / T.
LyapunovResult max_lyapunov(const SiteGraph& graph, const FieldState& init, double t_total,
                            double tau_r, double dt, std::uint64_t seed);

struct EnsembleLyapunov {
    std::vector<double> lambdas;  ///< per trajectory, in input column order
    double mean = 0.0;
    double sem = 0.0;
};

/// Benettin exponents for every column of `states`, batched like the ensemble
/// propagator (micro-batches of kBatchCols; bit-reproducible for any worker
/// count). Tangent seeds derive from (seed, tangent stream of the column).
EnsembleLyapunov ensemble_lyapunov(const SiteGraph& graph, const Eigen::MatrixXcd& states,
                                   double t_total, double tau_r, double dt, std::uint64_t seed,
                                   int workers);

/// Modulation-instability increment of the pair of modes pi +- q around the
/// band-top plane wave: nu(q) = |q| sqrt(2 g / J - q^2), zero outside the
/// unstable band. Rates are in units of J.
double mi_increment(double q, double g, double j_hop);

/// Exact plane-wave solution a_l(t) = exp[i kappa l + i(J cos(kappa) - g) t];
/// kappa must be commensurate, kappa = 2 pi m / M.
FieldState plane_wave_state(double kappa, int m, double t, double g, double j_hop);

struct MiMeasurement {
    double q = 0.0;
    double nu_predicted = 0.0;  ///< mi_increment(q), the quoted continuum bound
    double nu_measured = 0.0;   ///< log-slope of the sideband population |b_{pi+-q}|^2
    double r2 = 0.0;
};

/// Seeds the pi +- q sidebands of the kappa = pi plane wave on an M-site ring
/// and fits their exponential growth in the linear window.
MiMeasurement measure_mi_growth(int m, int mode_offset, double g, double j_hop, double dt);

enum class SweepAxis { Beta, Coupling, RingSize };

struct SweepConfig {
    SweepAxis axis = SweepAxis::Beta;
    std::vector<double> values;  ///< grid of beta, g, or ring size
    int m = 20;
    double g = 0.4;
    double beta = 0.5;      ///< fixed beta for the Coupling axis
    double n_bar = 1.0;
    double e_target = -0.533;  ///< fixed kinetic energy per site for the RingSize axis
    bool shifted = false;      ///< sample the half-zone-shifted (negative-T) ensemble
    int n_samples = 64;
    double t_total = 1000.0;
    double tau_r = 1.0;
    double dt = 0.01;
    std::uint64_t seed = 0;
};

struct SweepPoint {
    double grid_value = 0.0;
    double e_kin = 0.0;   ///< ensemble-mean kinetic energy per site at t=0
    double e_tot = 0.0;
    double lambda_mean = 0.0;
    double lambda_sem = 0.0;
    int n_samples = 0;
};

std::vector<SweepPoint> lyapunov_sweep(const SweepConfig& cfg, int workers);

}  // namespace bhpc
