#include "bhpc/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "bhpc/parallel.hpp"

namespace bhpc {

namespace {

/// cos/sin of theta with |e^{i theta}| = 1 well below the last ulp. Small
/// angles use a Taylor kernel (error < 3e-17 for |theta| < 0.1, the common
/// case for g |a|^2 dt/2). The smaller component is then reconstructed from
/// the larger through an extended-precision sqrt, so the pair's squared
/// modulus deviates from 1 by at most ~2e-16 * min(c,s)^2 instead of the
/// ~1e-16 a rounded cos/sin pair carries. The distinction matters because a
/// kick whose phasor modulus is biased by even one ulp pumps the norm
/// coherently, step after step, on near-stationary states.
inline void unit_phasor(double theta, double& c, double& s) {
    double x = theta * theta;
    if (x < 1e-2) {
        c = 1.0 + x * (-0.5 + x * (1.0 / 24 + x * (-1.0 / 720 + x * (1.0 / 40320))));
        s = theta *
            (1.0 + x * (-1.0 / 6 + x * (1.0 / 120 + x * (-1.0 / 5040 + x * (1.0 / 362880)))));
    } else {
        c = std::cos(theta);
        s = std::sin(theta);
    }
    if (std::abs(s) <= std::abs(c)) {
        const long double cl = c;
        s = std::copysign(static_cast<double>(sqrtl((1.0L - cl) * (1.0L + cl))), s);
    } else {
        const long double sl = s;
        c = std::copysign(static_cast<double>(sqrtl((1.0L - sl) * (1.0L + sl))), c);
    }
}

}  // namespace

Propagator make_propagator(const SiteGraph& graph, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_propagator: dt must be positive");
    Propagator prop;
    prop.dt = dt;
    prop.g_site = graph.g_site;
    prop.g_half_dt = graph.g_site * (0.5 * dt);
    prop.interacting = graph.g_site.cwiseAbs().maxCoeff() > 0.0;

    // The step matrix is applied up to ~1e5 times per run, so any coherent
    // modulus bias on its eigenvalues shows up as a linear norm drift. Build
    // it in extended precision and round once: the per-entry double rounding
    // is then incoherent and the eigenvalue moduli stay within ~1e-17 of 1.
    using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using MatCLd = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    const MatLd h = hopping_matrix(graph).cast<long double>();
    Eigen::SelfAdjointEigenSolver<MatLd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("make_propagator: eigendecomposition failed");
    const MatCLd v = es.eigenvectors().cast<std::complex<long double>>();
    Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1> phases(h.rows());
    for (int k = 0; k < h.rows(); ++k) {
        const long double w = es.eigenvalues()[k] * static_cast<long double>(dt);
        phases[k] = std::complex<long double>(cosl(w), -sinl(w));
    }
    MatCLd u = v * phases.asDiagonal() * v.transpose();
    // One Newton polar step scrubs the eigensolver's residual non-unitarity.
    u = 0.5L * (3.0L * u - u * (u.adjoint() * u));
    prop.linear_step = u.cast<std::complex<double>>();
    if (unitarity_defect(prop.linear_step) > 1e-12)
        throw std::runtime_error("make_propagator: linear step failed the unitarity check");
    return prop;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
    Eigen::MatrixXcd r = u.adjoint() * u;
    r.diagonal().array() -= 1.0;
    return r.cwiseAbs().maxCoeff();
}

FieldState eom_rhs(const SiteGraph& graph, const FieldState& state) {
    if (state.size() != graph.n_sites) throw std::invalid_argument("eom_rhs: length mismatch");
    FieldState ha = FieldState::Zero(graph.n_sites);
    for (const auto& b : graph.bonds) {
        ha[b.i] += -0.5 * b.hop * state[b.j];
        ha[b.j] += -0.5 * b.hop * state[b.i];
    }
    const std::complex<double> mi(0.0, -1.0);
    FieldState out(graph.n_sites);
    for (int l = 0; l < graph.n_sites; ++l)
        out[l] = mi * (ha[l] + graph.g_site[l] * std::norm(state[l]) * state[l]);
    return out;
}

void phase_kick(Eigen::MatrixXcd& batch, const Eigen::VectorXd& g_tau) {
    const int rows = static_cast<int>(batch.rows());
    const int cols = static_cast<int>(batch.cols());
    for (int t = 0; t < cols; ++t) {
        std::complex<double>* col = batch.col(t).data();
        for (int l = 0; l < rows; ++l) {
            double c, s;
            unit_phasor(g_tau[l] * std::norm(col[l]), c, s);
            col[l] *= std::complex<double>(c, -s);
        }
    }
}

void phase_kick_with_tangent(Eigen::MatrixXcd& states, Eigen::MatrixXcd& tangents,
                             const Eigen::VectorXd& g_tau) {
    const int rows = static_cast<int>(states.rows());
    const int cols = static_cast<int>(states.cols());
    for (int t = 0; t < cols; ++t) {
        std::complex<double>* a = states.col(t).data();
        std::complex<double>* d = tangents.col(t).data();
        for (int l = 0; l < rows; ++l) {
            double n2 = std::norm(a[l]);
            double theta = g_tau[l] * n2;
            double c, s;
            unit_phasor(theta, c, s);
            std::complex<double> e(c, -s);
            std::complex<double> corr =
                std::complex<double>(0.0, -g_tau[l]) * (n2 * d[l] + a[l] * a[l] * std::conj(d[l]));
            d[l] = e * (d[l] + corr);
            a[l] *= e;
        }
    }
}

void strang_step_batch(Eigen::MatrixXcd& batch, Eigen::MatrixXcd& scratch,
                       const Propagator& prop) {
    if (prop.interacting) phase_kick(batch, prop.g_half_dt);
    scratch.noalias() = prop.linear_step * batch;
    batch.swap(scratch);
    if (prop.interacting) phase_kick(batch, prop.g_half_dt);
}

void strang_step_batch_with_tangent(Eigen::MatrixXcd& states, Eigen::MatrixXcd& tangents,
                                    Eigen::MatrixXcd& scratch, const Propagator& prop) {
    if (prop.interacting) phase_kick_with_tangent(states, tangents, prop.g_half_dt);
    scratch.noalias() = prop.linear_step * states;
    states.swap(scratch);
    scratch.noalias() = prop.linear_step * tangents;
    tangents.swap(scratch);
    if (prop.interacting) phase_kick_with_tangent(states, tangents, prop.g_half_dt);
}

FieldState strang_step(const FieldState& state, const Propagator& prop) {
    Eigen::MatrixXcd batch = state;
    Eigen::MatrixXcd scratch(state.size(), 1);
    strang_step_batch(batch, scratch, prop);
    return batch.col(0);
}

SamplePlan plan_samples(const std::vector<double>& t_grid, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("plan_samples: dt must be positive");
    SamplePlan plan;
    long long prev = -1;
    for (double t : t_grid) {
        if (t < 0.0) throw std::invalid_argument("plan_samples: negative sample time");
        long long k = std::llround(t / dt);
        if (std::abs(t - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, std::abs(t)))
            plan.warnings.push_back("sample time " + std::to_string(t) + " snapped to step " +
                                    std::to_string(k));
        if (k <= prev) {
            if (k < prev) throw std::invalid_argument("plan_samples: sample times must increase");
            plan.warnings.push_back("duplicate sample at step " + std::to_string(k) + " dropped");
            continue;
        }
        prev = k;
        plan.steps.push_back(static_cast<int>(k));
        plan.times.push_back(static_cast<double>(k) * dt);
    }
    return plan;
}

void evolve_batches(const Eigen::MatrixXcd& init, const Propagator& prop, const SamplePlan& plan,
                    int workers, const BatchSink& sink) {
    const int n_traj = static_cast<int>(init.cols());
    const int rows = static_cast<int>(init.rows());
    if (rows != prop.linear_step.rows())
        throw std::invalid_argument("evolve_batches: state size does not match the propagator");
    const int n_batches = (n_traj + kBatchCols - 1) / kBatchCols;
    parallel_for(n_batches, workers, [&](int b) {
        const int col0 = b * kBatchCols;
        const int cols = std::min(kBatchCols, n_traj - col0);
        Eigen::MatrixXcd block = init.middleCols(col0, cols);
        Eigen::MatrixXcd scratch(rows, cols);
        int step = 0;
        for (size_t s = 0; s < plan.steps.size(); ++s) {
            for (; step < plan.steps[s]; ++step) strang_step_batch(block, scratch, prop);
            sink(static_cast<int>(s), b, col0, block);
        }
    });
}

Snapshots evolve_ensemble(const Ensemble& ens, const Propagator& prop,
                          const std::vector<double>& t_grid, int workers) {
    SamplePlan plan = plan_samples(t_grid, prop.dt);
    Snapshots snaps;
    snaps.times = plan.times;
    snaps.warnings = plan.warnings;
    snaps.states.assign(plan.steps.size(),
                        Eigen::MatrixXcd(ens.states.rows(), ens.states.cols()));
    evolve_batches(ens.states, prop, plan, workers,
                   [&](int s, int, int col0, const Eigen::MatrixXcd& block) {
                       snaps.states[static_cast<size_t>(s)].middleCols(col0, block.cols()) = block;
                   });
    return snaps;
}

}  // namespace bhpc
