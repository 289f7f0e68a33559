#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "bhpc/lattice.hpp"
#include "bhpc/thermal.hpp"

namespace bhpc {

/// Strang-splitting propagator: half-step on-site phase, exact linear step,
/// half-step phase. Both substeps preserve the per-trajectory norm exactly up
/// to rounding, and the scheme is exact in the two integrable limits g = 0
/// and J = 0.
struct Propagator {
    double dt = 0.0;
    Eigen::MatrixXcd linear_step;  ///< exp(-i h dt), unitary to 1e-12
    Eigen::VectorXd g_site;
    Eigen::VectorXd g_half_dt;     ///< g_site * dt / 2, the phase-kick strength
    bool interacting = false;      ///< any nonzero g_site
};

Propagator make_propagator(const SiteGraph& graph, double dt);

/// max |(U^H U - I)_{ij}|.
double unitarity_defect(const Eigen::MatrixXcd& u);

/// da/dt = -i (h a + g |a|^2 a), the canonical equations of the classical
/// Hamiltonian. On a ring: da_l/dt = -i[-(J/2)(a_{l+1}+a_{l-1}) + g|a_l|^2 a_l].
FieldState eom_rhs(const SiteGraph& graph, const FieldState& state);

/// One Strang step of a single trajectory.
FieldState strang_step(const FieldState& state, const Propagator& prop);

/// ---- batched kernels -------------------------------------------------------
/// Trajectories are matrix columns; a fixed micro-batch width keeps the
/// trajectory-to-batch partition (and hence every rounding decision)
/// independent of the worker count.
inline constexpr int kBatchCols = 64;

/// In-place on-site phase: a -> a exp(-i g_tau[row] |a|^2) per element.
void phase_kick(Eigen::MatrixXcd& batch, const Eigen::VectorXd& g_tau);

/// Phase kick plus its exact Jacobian action on a tangent batch:
/// delta -> exp(-i theta) [(1 - i theta) delta - i g_tau a^2 conj(delta)]
/// with theta = g_tau |a|^2 evaluated at the pre-kick state.
void phase_kick_with_tangent(Eigen::MatrixXcd& states, Eigen::MatrixXcd& tangents,
                             const Eigen::VectorXd& g_tau);

/// One Strang step of a batch; scratch must have the batch's shape.
void strang_step_batch(Eigen::MatrixXcd& batch, Eigen::MatrixXcd& scratch, const Propagator& prop);

/// Strang step of states and tangents together (tangents get the linearized
/// kick and the same linear step).
void strang_step_batch_with_tangent(Eigen::MatrixXcd& states, Eigen::MatrixXcd& tangents,
                                    Eigen::MatrixXcd& scratch, const Propagator& prop);

/// ---- sampling plan ---------------------------------------------------------
struct SamplePlan {
    std::vector<int> steps;            ///< strictly increasing step indices
    std::vector<double> times;         ///< snapped times, steps[i] * dt
    std::vector<std::string> warnings; ///< non-commensurate or duplicate inputs
};

/// Maps requested times onto integer steps of dt, snapping to the nearest
/// step and recording a warning when the request was not commensurate.
SamplePlan plan_samples(const std::vector<double>& t_grid, double dt);

/// Called once per (sample time, micro-batch); `block` holds the batch's
/// trajectories (columns col0 .. col0+block.cols()-1) at that time. Sinks must
/// write only to storage owned by the (sample, batch) pair.
using BatchSink =
    std::function<void(int sample_idx, int batch_idx, int col0, const Eigen::MatrixXcd& block)>;

/// Evolves all trajectories through the sample plan, dispatching micro-batches
/// to workers. The batch partition is fixed by the column count alone, so the
/// sink sees bit-identical blocks for any worker count.
void evolve_batches(const Eigen::MatrixXcd& init, const Propagator& prop, const SamplePlan& plan,
                    int workers, const BatchSink& sink);

struct Snapshots {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;  ///< one n_sites x n_traj matrix per time
    std::vector<std::string> warnings;
};

/// Materialized snapshots of the whole ensemble at each sample time.
Snapshots evolve_ensemble(const Ensemble& ens, const Propagator& prop,
                          const std::vector<double>& t_grid, int workers = 1);

}  // namespace bhpc
