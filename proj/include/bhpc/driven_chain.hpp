#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bhpc {

/// Non-interacting tight-binding chain coupled to particle reservoirs at its
/// two ends (Markovian rates Gamma, reservoir densities n).
struct DrivenChainSpec {
    int l = 1;            ///< chain length
    double j_hop = 1.0;
    double gamma_l = 0.0;
    double gamma_r = 0.0;
    double n_l = 0.0;
    double n_r = 0.0;
};

/// Closed-form quasi-stationary current for equal boundary rates:
/// j = J^2 Gamma / (J^2 + Gamma^2) * (n_l - n_r) / 2.
double analytic_current(const DrivenChainSpec& spec);

struct SteadyCovariance {
    Eigen::MatrixXcd sigma;  ///< steady <a_i^dag a_j>
    double current = 0.0;    ///< boundary inflow Gamma_l (n_l - sigma_00)
    std::vector<double> bond_currents;  ///< internal bonds; uniform at stationarity
};

/// Steady state of the quadratic Lindblad generator,
///   d(sigma)/dt = i[h, sigma] - (1/2){G, sigma} + P,
/// with h the chain hopping matrix (-J/2 per bond), G = diag boundary rates,
/// P = diag(Gamma_i n_i); solved by vectorizing into an L^2 linear system.
SteadyCovariance steady_covariance(const DrivenChainSpec& spec);

}  // namespace bhpc
