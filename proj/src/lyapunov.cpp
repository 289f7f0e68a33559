#include "bhpc/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

#include "bhpc/parallel.hpp"
#include "bhpc/rng.hpp"
#include "bhpc/stats.hpp"

namespace bhpc {

namespace {

// Stream ids 0..3 << 40 belong to region sampling; tangents live above them.
constexpr std::uint64_t kTangentStreamBase = std::uint64_t(4) << 40;

}  // namespace

FieldState tangent_rhs(const SiteGraph& graph, const FieldState& state,
                       const FieldState& tangent) {
    if (state.size() != graph.n_sites || tangent.size() != graph.n_sites)
        throw std::invalid_argument("tangent_rhs: length mismatch");
    FieldState hd = FieldState::Zero(graph.n_sites);
    for (const auto& b : graph.bonds) {
        hd[b.i] += -0.5 * b.hop * tangent[b.j];
        hd[b.j] += -0.5 * b.hop * tangent[b.i];
    }
    const std::complex<double> mi(0.0, -1.0);
    FieldState out(graph.n_sites);
    for (int l = 0; l < graph.n_sites; ++l) {
        std::complex<double> nl = graph.g_site[l] * (2.0 * std::norm(state[l]) * tangent[l] +
                                                     state[l] * state[l] * std::conj(tangent[l]));
        out[l] = mi * (hd[l] + nl);
    }
    return out;
}

FieldState random_tangent(const FieldState& state, std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    FieldState d(state.size());
    for (int l = 0; l < state.size(); ++l) d[l] = rng.complex_normal();
    // The tangent flow is only real-linear (it couples delta and conj(delta)),
    // so neutral directions are removed in the real inner product.
    FieldState phase_dir = std::complex<double>(0.0, 1.0) * state;
    double p2 = phase_dir.squaredNorm();
    if (p2 > 0.0) {
        double overlap = (phase_dir.adjoint() * d)(0).real();
        d -= (overlap / p2) * phase_dir;
    }
    double nrm = d.norm();
    if (nrm == 0.0) throw std::runtime_error("random_tangent: degenerate draw");
    return d / nrm;
}

namespace {

struct BenettinOptions {
    double t_total;
    double tau_r;
    double dt;
    bool keep_diagnostics;
};

// Runs Benettin on the columns of `states` with tangents `tangents` (unit
// norm); returns per-column exponents, optionally the running estimates of
// column 0.
void benettin_batch(Eigen::MatrixXcd states, Eigen::MatrixXcd tangents, const Propagator& prop,
                    const BenettinOptions& opt, double* lambdas, LyapunovResult* diag) {
    const int cols = static_cast<int>(states.cols());
    const int r_steps = std::max(1, static_cast<int>(std::llround(opt.tau_r / opt.dt)));
    const int n_ren = std::max(1, static_cast<int>(std::llround(opt.t_total / opt.tau_r)));
    Eigen::MatrixXcd scratch(states.rows(), cols);
    Eigen::VectorXd log_sum = Eigen::VectorXd::Zero(cols);
    const double t_elapsed_per_ren = r_steps * opt.dt;
    for (int ren = 1; ren <= n_ren; ++ren) {
        for (int s = 0; s < r_steps; ++s)
            strang_step_batch_with_tangent(states, tangents, scratch, prop);
        for (int c = 0; c < cols; ++c) {
            double nrm = tangents.col(c).norm();
            log_sum[c] += std::log(nrm);
            tangents.col(c) /= nrm;
        }
        if (diag && opt.keep_diagnostics) {
            diag->diag_times.push_back(ren * t_elapsed_per_ren);
            diag->running_lambda.push_back(log_sum[0] / (ren * t_elapsed_per_ren));
        }
    }
    for (int c = 0; c < cols; ++c) lambdas[c] = log_sum[c] / (n_ren * t_elapsed_per_ren);
}

}  // namespace

LyapunovResult max_lyapunov(const SiteGraph& graph, const FieldState& init, double t_total,
                            double tau_r, double dt, std::uint64_t seed) {
    if (!(t_total > tau_r)) throw std::invalid_argument("max_lyapunov: need T >> tau_r");
    Propagator prop = make_propagator(graph, dt);
    Eigen::MatrixXcd states = init;
    Eigen::MatrixXcd tangents = random_tangent(init, seed, kTangentStreamBase);
    LyapunovResult out;
    BenettinOptions opt{t_total, tau_r, dt, true};
    benettin_batch(std::move(states), std::move(tangents), prop, opt, &out.lambda, &out);
    // benettin_batch wrote column 0's exponent into out.lambda via the pointer.
    return out;
}

EnsembleLyapunov ensemble_lyapunov(const SiteGraph& graph, const Eigen::MatrixXcd& states,
                                   double t_total, double tau_r, double dt, std::uint64_t seed,
                                   int workers) {
    const int n_traj = static_cast<int>(states.cols());
    Propagator prop = make_propagator(graph, dt);
    EnsembleLyapunov out;
    out.lambdas.assign(static_cast<size_t>(n_traj), 0.0);
    const int n_batches = (n_traj + kBatchCols - 1) / kBatchCols;
    BenettinOptions opt{t_total, tau_r, dt, false};
    parallel_for(n_batches, workers, [&](int b) {
        const int col0 = b * kBatchCols;
        const int cols = std::min(kBatchCols, n_traj - col0);
        Eigen::MatrixXcd block = states.middleCols(col0, cols);
        Eigen::MatrixXcd tangents(states.rows(), cols);
        for (int c = 0; c < cols; ++c)
            tangents.col(c) = random_tangent(
                block.col(c), seed, kTangentStreamBase + static_cast<std::uint64_t>(col0 + c));
        benettin_batch(std::move(block), std::move(tangents), prop, opt, &out.lambdas[col0],
                       nullptr);
    });
    MeanSem ms = mean_sem(out.lambdas);
    out.mean = ms.mean;
    out.sem = ms.sem;
    return out;
}

double mi_increment(double q, double g, double j_hop) {
    double radicand = 2.0 * g / j_hop - q * q;
    return radicand <= 0.0 ? 0.0 : std::abs(q) * std::sqrt(radicand);
}

FieldState plane_wave_state(double kappa, int m, double t, double g, double j_hop) {
    double winding = kappa * m / (2.0 * M_PI);
    if (std::abs(winding - std::llround(winding)) > 1e-9)
        throw std::invalid_argument("plane_wave_state: kappa must be a multiple of 2 pi / M");
    FieldState a(m);
    const double rate = j_hop * std::cos(kappa) - g;
    for (int l = 0; l < m; ++l) {
        double phase = kappa * l + rate * t;
        a[l] = std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return a;
}

MiMeasurement measure_mi_growth(int m, int mode_offset, double g, double j_hop, double dt) {
    if (m % 2 != 0) throw std::invalid_argument("measure_mi_growth: need even M for kappa = pi");
    if (mode_offset <= 0 || mode_offset >= m / 2)
        throw std::invalid_argument("measure_mi_growth: sideband offset out of range");
    MiMeasurement out;
    out.q = 2.0 * M_PI * mode_offset / m;
    out.nu_predicted = mi_increment(out.q, g, j_hop);
    if (out.nu_predicted <= 0.0)
        throw std::invalid_argument("measure_mi_growth: mode is outside the unstable band");

    SiteGraph graph = build_layout(LayoutSpec::ring(m, j_hop, g));
    Propagator prop = make_propagator(graph, dt);
    Eigen::MatrixXcd f = dft_matrix(m);
    const int k_plus = m / 2 + mode_offset;
    const int k_minus = m / 2 - mode_offset;

    // Band-top plane wave with both sidebands seeded well inside the linear
    // regime; the growing Bogoliubov mode dominates after a short transient.
    const double seed_amp = 1e-6;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(m);
    b[m / 2] = std::sqrt(static_cast<double>(m));
    b[k_plus] = seed_amp;
    b[k_minus] = seed_amp;
    Eigen::MatrixXcd state = f * b;
    Eigen::MatrixXcd scratch(m, 1);

    const double t_sample = 0.25;
    const int steps_per_sample = std::max(1, static_cast<int>(std::llround(t_sample / dt)));
    std::vector<double> ts, log_pop;
    double t = 0.0;
    // Fit while the sideband pair sits between 1e-10 and 1e-5 in population:
    // far above the seeding transient, far below back-reaction on the pump.
    const double pop_lo = 1e-10, pop_hi = 1e-5;
    for (int iter = 0; iter < 4000; ++iter) {
        Eigen::VectorXcd modes = f.adjoint() * state.col(0);
        double pop = std::norm(modes[k_plus]) + std::norm(modes[k_minus]);
        if (pop > pop_hi) break;
        if (pop > pop_lo) {
            ts.push_back(t);
            log_pop.push_back(std::log(pop));
        }
        for (int s = 0; s < steps_per_sample; ++s) strang_step_batch(state, scratch, prop);
        t += steps_per_sample * dt;
    }
    if (ts.size() < 5)
        throw std::runtime_error("measure_mi_growth: no linear-growth window captured");
    LinearFit fit = linear_fit(ts, log_pop);
    out.nu_measured = fit.slope;  // log-slope of the sideband population
    out.r2 = fit.r2;
    return out;
}

std::vector<SweepPoint> lyapunov_sweep(const SweepConfig& cfg, int workers) {
    if (cfg.values.empty()) throw std::invalid_argument("lyapunov_sweep: empty grid");
    std::vector<SweepPoint> table;
    for (double value : cfg.values) {
        int m = cfg.m;
        double g = cfg.g;
        ThermalPoint pt;
        switch (cfg.axis) {
            case SweepAxis::Beta:
                pt = thermal_point(value, cfg.n_bar, m);
                break;
            case SweepAxis::Coupling:
                g = value;
                pt = thermal_point(cfg.beta, cfg.n_bar, m);
                break;
            case SweepAxis::RingSize:
                m = static_cast<int>(std::llround(value));
                pt = solve_beta_mu(cfg.n_bar, cfg.e_target, m);
                break;
        }
        SiteGraph graph = build_layout(LayoutSpec::ring(m, 1.0, g));
        Ensemble ens = sample_quantum_ensemble(pt, cfg.n_samples, cfg.seed, cfg.shifted);
        EnsembleLyapunov el =
            ensemble_lyapunov(graph, ens.states, cfg.t_total, cfg.tau_r, cfg.dt, cfg.seed, workers);
        SweepPoint point;
        point.grid_value = value;
        point.n_samples = cfg.n_samples;
        point.lambda_mean = el.mean;
        point.lambda_sem = el.sem;
        std::vector<double> ek(static_cast<size_t>(cfg.n_samples)),
            et(static_cast<size_t>(cfg.n_samples));
        for (int tcol = 0; tcol < cfg.n_samples; ++tcol) {
            EnergyBreakdown e = classical_energy(graph, ens.states.col(tcol));
            ek[static_cast<size_t>(tcol)] = e.kinetic / m;
            et[static_cast<size_t>(tcol)] = e.total / m;
        }
        point.e_kin = mean_sem(ek).mean;
        point.e_tot = mean_sem(et).mean;
        table.push_back(point);
    }
    return table;
}

}  // namespace bhpc
