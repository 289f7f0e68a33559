#include <doctest.h>

#include <cmath>
#include <complex>

#include "bhpc/dynamics.hpp"
#include "bhpc/observables.hpp"

using namespace bhpc;

namespace {

Eigen::MatrixXcd single_plane_wave(int m, int mode) {
    Eigen::MatrixXcd s(m, 1);
    for (int l = 0; l < m; ++l) s(l, 0) = std::polar(1.0, 2.0 * M_PI * mode * l / m);
    return s;
}

}  // namespace

TEST_CASE("spdm is Hermitian with trace equal to the region particle number") {
    SiteGraph g = build_layout(LayoutSpec::ring(10, 1.0, 0.4));
    ThermalPoint pt = thermal_point(1.0, 1.0, 10);
    Ensemble ens = sample_quantum_ensemble(pt, 256, 4);
    Spdm rho = spdm(ens.states, g, Region::Whole);
    CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    double n_total = populations_and_counts(ens.states, g).total;
    CHECK(rho.rho.trace().real() == doctest::Approx(n_total).epsilon(1e-12));
    CHECK(rho.rho.trace().imag() == doctest::Approx(0.0).epsilon(1e-14));
    for (int k = 0; k < 10; ++k) CHECK(rho.rho(k, k).real() > 0.0);
}

TEST_CASE("a single plane wave concentrates the Bloch matrix in one entry") {
    const int m = 20, mode = 7;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0));
    Eigen::MatrixXcd s = single_plane_wave(m, mode);
    Spdm bloch = spdm_bloch(s, g, Region::Whole);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double expected = (i == mode && j == mode) ? m : 0.0;
            CHECK(std::abs(bloch.rho(i, j) - expected) < 1e-10);
        }
}

TEST_CASE("to_bloch is the exact unitary conjugation") {
    const int m = 12;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0));
    // Identity SPDM is basis-independent.
    Spdm ident;
    ident.rho = Eigen::MatrixXcd::Identity(m, m);
    ident.basis = SpdmBasis::Wannier;
    CHECK((to_bloch(ident).rho - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-13);

    ThermalPoint pt = thermal_point(2.0, 1.0, m);
    Ensemble ens = sample_quantum_ensemble(pt, 64, 1);
    Spdm w = spdm(ens.states, g, Region::Whole);
    Spdm b = to_bloch(w);
    CHECK(b.rho.trace().real() == doctest::Approx(w.rho.trace().real()).epsilon(1e-12));
    // Matches the SPDM computed natively from the transformed snapshot.
    Spdm b2 = spdm_bloch(ens.states, g, Region::Whole);
    CHECK((b.rho - b2.rho).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS(to_bloch(b));
}

TEST_CASE("t=0 Bloch diagonal reproduces the sampled occupations") {
    const int m = 20;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0));
    ThermalPoint pt = thermal_point(2.0, 1.0, m);
    Eigen::VectorXd n = mode_occupations(pt);
    const int n_traj = 2048;
    Ensemble ens = sample_quantum_ensemble(pt, n_traj, 0);
    Spdm bloch = spdm_bloch(ens.states, g, Region::Whole);
    for (int k = 0; k < m; ++k) {
        double dev = std::abs(bloch.rho(k, k).real() - n[k]);
        CHECK(dev < 5.0 * n[k] / std::sqrt(double(n_traj)));
        // The magnitude-SEM estimate is on the right scale for the diagonal.
        CHECK(bloch.sem(k, k) == doctest::Approx(n[k] / std::sqrt(double(n_traj))).epsilon(0.2));
    }
}

TEST_CASE("populations and counts partition the total norm") {
    SiteGraph g = build_layout(LayoutSpec::two_rings_chain(6, 2, 0.2, 1.0, 0.4, 0.0));
    ThermalPoint pt = thermal_point(1.0, 1.0, 6);
    Ensemble ens = sample_layout_ensemble(
        g, {{Region::LeftRing, pt, false}, {Region::RightRing, pt, false}}, 128, 3);
    SitePopulations pop = populations_and_counts(ens.states, g);
    CHECK(pop.counts.at(Region::Chain) == 0.0);
    double sum = 0.0;
    for (const auto& [r, c] : pop.counts) sum += c;
    CHECK(sum == doctest::Approx(pop.total).epsilon(1e-12));
}

TEST_CASE("bond current of a real state vanishes; of a plane wave it is J sin kappa") {
    const int m = 16, mode = 3;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0));
    Eigen::MatrixXcd real_state = Eigen::MatrixXcd::Constant(m, 1, 0.7);
    CHECK(bond_current(real_state, g.bonds[0]) == 0.0);

    Eigen::MatrixXcd pw = single_plane_wave(m, mode);
    double kappa = 2.0 * M_PI * mode / m;
    for (const auto& b : g.bonds) {
        double j = b.i == (b.j + 1) % m ? -bond_current(pw, b) : bond_current(pw, b);
        CHECK(j == doctest::Approx(std::sin(kappa)).epsilon(1e-12));
    }
}

TEST_CASE("junction current satisfies the continuity relation") {
    SiteGraph g = build_layout(LayoutSpec::two_rings_point(6, 0.3, 1.0, 0.4));
    ThermalPoint pt = thermal_point(1.0, 1.0, 6);
    Ensemble ens =
        sample_layout_ensemble(g, {{Region::LeftRing, pt, false}}, 64, 17);
    const double dt = 0.01;
    Propagator prop = make_propagator(g, dt);
    Snapshots snaps = evolve_ensemble(ens, prop, {2.0 - dt, 2.0, 2.0 + dt}, 1);
    auto n_left = [&](int i) {
        return populations_and_counts(snaps.states[i], g).counts.at(Region::LeftRing);
    };
    double dn_dt = (n_left(2) - n_left(0)) / (2.0 * dt);
    const Bond& jb = g.bonds[g.junction_bonds[0]];
    double j = bond_current(snaps.states[1], jb);
    CHECK(dn_dt == doctest::Approx(-j).epsilon(1e-4));
}

TEST_CASE("transport fit recovers synthetic exponentials exactly") {
    TransportRecord rec;
    rec.m = 40;
    for (int i = 0; i <= 200; ++i) {
        double t = i * 2.0;
        rec.times.push_back(t);
        rec.delta_n.push_back(10.0 * std::exp(-0.002 * t));
        rec.n_chain.push_back(1.0);
        rec.n_left.push_back(0.0);
        rec.n_right.push_back(0.0);
    }
    TransportFit fit = transport_fit(rec, 0.0, 400.0);
    CHECK(fit.s == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(fit.z_slope == doctest::Approx(-2.0 * 0.002 / 40).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    TransportRecord flat = rec;
    for (auto& d : flat.delta_n) d = 5.0;
    CHECK(transport_fit(flat, 0.0, 400.0).s == doctest::Approx(0.0).epsilon(1e-14));

    TransportRecord crossing = rec;
    crossing.delta_n[100] = -0.1;
    CHECK_THROWS(transport_fit(crossing, 0.0, 400.0));
}

TEST_CASE("rate extraction inverts the current-response relation") {
    auto make_record = [](double kappa_target) {
        // Synthetic quasi-stationary series with 2 j / dn = kappa.
        TransportRecord rec;
        rec.m = 40;
        rec.epsilon = 0.1;
        for (int i = 0; i < 50; ++i) {
            rec.times.push_back(i);
            rec.n_left.push_back(40.0);
            rec.n_right.push_back(20.0);
            rec.n_chain.push_back(1.0);
            rec.delta_n.push_back(20.0);
            rec.current.push_back(kappa_target * 0.25);  // dn = 0.5
        }
        return rec;
    };
    // kappa = J/2 is the degenerate root Gamma = J.
    GammaExtraction at_max = extract_gamma(make_record(0.5), 1.0, 0.0, 100.0);
    CHECK(at_max.gamma_big == doctest::Approx(1.0).epsilon(1e-12));
    // Small kappa: Gamma -> kappa.
    GammaExtraction small = extract_gamma(make_record(1e-4), 1.0, 0.0, 100.0);
    CHECK(small.gamma_big == doctest::Approx(1e-4).epsilon(1e-6));
    CHECK(small.gamma_rate == doctest::Approx(0.01 / small.gamma_big).epsilon(1e-12));
    // kappa beyond J/2 has no Markovian solution.
    CHECK_THROWS(extract_gamma(make_record(0.51), 1.0, 0.0, 100.0));
}

TEST_CASE("default fit window starts at 90% of the chain plateau") {
    TransportRecord rec;
    rec.m = 40;
    for (int i = 0; i <= 100; ++i) {
        double t = i * 1.0;
        rec.times.push_back(t);
        rec.n_chain.push_back(2.0 * (1.0 - std::exp(-t / 5.0)));
        rec.delta_n.push_back(20.0 - 0.01 * t);
        rec.n_left.push_back(40.0);
        rec.n_right.push_back(20.0);
    }
    auto [t0, t1] = default_fit_window(rec);
    CHECK(t0 > 5.0);
    CHECK(t0 < 20.0);
    CHECK(t1 == 100.0);
}

TEST_CASE("refit of a fresh non-interacting ensemble recovers the generating state") {
    const int m = 20;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0, 0.0));
    ThermalPoint pt = thermal_point(2.0, 1.0, m);
    Ensemble ens = sample_quantum_ensemble(pt, 4096, 8);
    RefitResult refit = be_refit(ens.states, g, Region::Whole);
    CHECK(refit.point.beta == doctest::Approx(2.0).epsilon(0.08));
    CHECK(refit.point.mu == doctest::Approx(pt.mu).epsilon(0.05));
    // By construction the refit matches density and kinetic energy; the
    // remaining per-mode deviation is Monte-Carlo noise.
    CHECK(refit.max_rel_dev < 0.10);
}

TEST_CASE("be_deviation measures the worst relative mode error") {
    ThermalPoint pt = thermal_point(1.0, 1.0, 10);
    Eigen::VectorXd n = mode_occupations(pt);
    Eigen::VectorXd off = n;
    off[3] *= 1.25;
    auto [dev, rel] = be_deviation(off, pt);
    CHECK(rel == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(dev == doctest::Approx(0.25 * n[3]).epsilon(1e-12));
}

TEST_CASE("energy histogram bins per-trajectory energies per site") {
    const int m = 12;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0, 0.4));
    Eigen::MatrixXcd states(m, 3);
    states.col(0) = single_plane_wave(m, 0);
    states.col(1) = single_plane_wave(m, 3);
    states.col(2) = single_plane_wave(m, 6);
    Histogram h = energy_histogram(states, g, EnergyComponent::Kinetic, 3, -1.5, 1.5);
    CHECK(h.values.size() == 3);
    CHECK(h.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(h.values[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(h.values[2] == doctest::Approx(1.0).epsilon(1e-12));
    int total = 0;
    for (int c : h.counts) total += c;
    CHECK(total == 3);
    Histogram p = energy_histogram(states, g, EnergyComponent::Potential, 3);
    CHECK(p.mean == doctest::Approx(0.2).epsilon(1e-12));
}
