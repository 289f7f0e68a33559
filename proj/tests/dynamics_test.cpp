#include <doctest.h>

#include <cmath>
#include <complex>

#include "bhpc/dynamics.hpp"
#include "bhpc/thermal.hpp"

using namespace bhpc;

namespace {

FieldState plane_wave(int m, int mode) {
    FieldState a(m);
    for (int l = 0; l < m; ++l) a[l] = std::polar(1.0, 2.0 * M_PI * mode * l / m);
    return a;
}

}  // namespace

TEST_CASE("linear step is unitary and the splitting is exact at g = 0") {
    SiteGraph g = build_layout(LayoutSpec::ring(16, 1.0, 0.0));
    Propagator prop = make_propagator(g, 0.01);
    CHECK(unitarity_defect(prop.linear_step) < 1e-13);
    CHECK_FALSE(prop.interacting);

    FieldState a(16);
    for (int l = 0; l < 16; ++l) a[l] = std::complex<double>(std::cos(0.3 * l), 0.1 * l);
    FieldState stepped = a;
    const int n = 100;
    for (int s = 0; s < n; ++s) stepped = strang_step(stepped, prop);
    Propagator whole = make_propagator(g, 0.01 * n);
    FieldState direct = whole.linear_step * a;
    CHECK((stepped - direct).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eom_rhs on trivial states") {
    SiteGraph g = build_layout(LayoutSpec::ring(10, 1.0, 0.4));
    CHECK(eom_rhs(g, FieldState::Zero(10)).norm() == 0.0);

    FieldState ones = FieldState::Constant(10, 1.0);
    FieldState rhs = eom_rhs(g, ones);
    for (int l = 0; l < 10; ++l) {
        CHECK(rhs[l].real() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rhs[l].imag() == doctest::Approx(0.6).epsilon(1e-14));
    }
}

TEST_CASE("plane wave rotates at rate J cos(kappa) - g") {
    const int m = 12, mode = 2;
    const double g_int = 0.4, kappa = 2.0 * M_PI * mode / m;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0, g_int));
    FieldState a = plane_wave(m, mode);
    FieldState rhs = eom_rhs(g, a);
    const std::complex<double> expected_rate(0.0, std::cos(kappa) - g_int);
    for (int l = 0; l < m; ++l)
        CHECK(std::abs(rhs[l] - expected_rate * a[l]) < 1e-13);

    // The integrator keeps |a| = 1 per site and advances the same phase.
    Propagator prop = make_propagator(g, 0.01);
    FieldState evolved = a;
    const int n = 500;
    for (int s = 0; s < n; ++s) evolved = strang_step(evolved, prop);
    const double t = 0.01 * n;
    for (int l = 0; l < m; ++l) {
        CHECK(std::abs(std::abs(evolved[l]) - 1.0) < 1e-12);
        std::complex<double> expected = a[l] * std::polar(1.0, (std::cos(kappa) - g_int) * t);
        CHECK(std::abs(evolved[l] - expected) < 1e-10);
    }
}

TEST_CASE("phase kick matches the exact on-site map on both kernel branches") {
    Eigen::MatrixXcd batch(2, 3);
    // |a|^2 g tau spans the small-angle kernel and the std fallback.
    batch << std::complex<double>(0.3, 0.1), std::complex<double>(2.0, -1.0),
        std::complex<double>(0.0, 3.0), std::complex<double>(-0.2, 0.05),
        std::complex<double>(1.4, 1.4), std::complex<double>(-2.5, 0.5);
    Eigen::VectorXd g_tau(2);
    g_tau << 0.002, 0.6;
    Eigen::MatrixXcd kicked = batch;
    phase_kick(kicked, g_tau);
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 2; ++r) {
            std::complex<double> exact =
                batch(r, c) * std::polar(1.0, -g_tau[r] * std::norm(batch(r, c)));
            // The kick favors exact modulus over the last ulp of phase, so the
            // value check is a touch looser than the modulus check.
            CHECK(std::abs(kicked(r, c) - exact) < 1e-13);
            CHECK(std::abs(std::abs(kicked(r, c)) / std::abs(batch(r, c)) - 1.0) < 5e-16);
        }
}

TEST_CASE("norm is conserved to rounding over long interacting runs") {
    SiteGraph g = build_layout(LayoutSpec::ring(20, 1.0, 0.4));
    Propagator prop = make_propagator(g, 0.01);
    ThermalPoint pt = thermal_point(2.0, 1.0, 20);
    Ensemble ens = sample_quantum_ensemble(pt, 4, 11);
    Eigen::VectorXd norms0(4);
    for (int t = 0; t < 4; ++t) norms0[t] = ens.states.col(t).squaredNorm();
    Eigen::MatrixXcd batch = ens.states;
    Eigen::MatrixXcd scratch(20, 4);
    for (int s = 0; s < 10000; ++s) strang_step_batch(batch, scratch, prop);
    for (int t = 0; t < 4; ++t)
        CHECK(std::abs(batch.col(t).squaredNorm() / norms0[t] - 1.0) < 1e-12);
}

TEST_CASE("energy error over t=100 at dt=0.01 stays a bounded dt^2 oscillation") {
    SiteGraph g = build_layout(LayoutSpec::ring(20, 1.0, 0.4));
    Propagator prop = make_propagator(g, 0.01);
    ThermalPoint pt = thermal_point(2.0, 1.0, 20);
    Ensemble ens = sample_quantum_ensemble(pt, 1, 3);
    FieldState a = ens.states.col(0);
    const double e0 = classical_energy(g, a).total;
    Eigen::MatrixXcd batch = a;
    Eigen::MatrixXcd scratch(20, 1);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
        strang_step_batch(batch, scratch, prop);
        if (s % 1000 == 999) {
            double e = classical_energy(g, batch.col(0)).total;
            worst = std::max(worst, std::abs((e - e0) / e0));
        }
    }
    // The splitting conserves a shadow Hamiltonian: the energy error
    // oscillates at O(dt^2) without secular growth.
    CHECK(worst < 1e-5);
}

TEST_CASE("global error scales as dt^2") {
    SiteGraph g = build_layout(LayoutSpec::ring(6, 1.0, 0.8));
    ThermalPoint pt = thermal_point(0.5, 1.0, 6);
    FieldState a0 = sample_quantum_ensemble(pt, 1, 9).states.col(0);
    auto run = [&](double dt, double t_final) {
        Propagator prop = make_propagator(g, dt);
        Eigen::MatrixXcd b = a0;
        Eigen::MatrixXcd scratch(6, 1);
        int n = static_cast<int>(std::llround(t_final / dt));
        for (int s = 0; s < n; ++s) strang_step_batch(b, scratch, prop);
        return FieldState(b.col(0));
    };
    FieldState ref = run(0.002, 10.0);
    double e_coarse = (run(0.04, 10.0) - ref).norm();
    double e_fine = (run(0.02, 10.0) - ref).norm();
    double ratio = e_coarse / e_fine;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("sample plans snap non-commensurate times and drop duplicates") {
    SamplePlan plan = plan_samples({0.0, 0.5, 1.0}, 0.01);
    CHECK(plan.steps == std::vector<int>{0, 50, 100});
    CHECK(plan.warnings.empty());

    SamplePlan snapped = plan_samples({0.503}, 0.01);
    CHECK(snapped.steps == std::vector<int>{50});
    CHECK(snapped.warnings.size() == 1);

    SamplePlan dup = plan_samples({0.1, 0.1001}, 0.01);
    CHECK(dup.steps == std::vector<int>{10});
    CHECK(dup.warnings.size() >= 1);

    CHECK_THROWS(plan_samples({1.0, 0.5}, 0.01));
}

TEST_CASE("ensemble evolution is deterministic across worker counts") {
    SiteGraph g = build_layout(LayoutSpec::ring(10, 1.0, 0.4));
    Propagator prop = make_propagator(g, 0.01);
    ThermalPoint pt = thermal_point(1.0, 1.0, 10);
    Ensemble ens = sample_quantum_ensemble(pt, 200, 21);  // several micro-batches
    Snapshots one = evolve_ensemble(ens, prop, {0.0, 1.0, 2.0}, 1);
    Snapshots four = evolve_ensemble(ens, prop, {0.0, 1.0, 2.0}, 4);
    REQUIRE(one.states.size() == four.states.size());
    for (size_t s = 0; s < one.states.size(); ++s)
        CHECK((one.states[s] - four.states[s]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("snapshots track a single trajectory exactly") {
    SiteGraph g = build_layout(LayoutSpec::ring(8, 1.0, 0.4));
    Propagator prop = make_propagator(g, 0.01);
    ThermalPoint pt = thermal_point(1.0, 1.0, 8);
    Ensemble ens = sample_quantum_ensemble(pt, 3, 2);
    Snapshots snaps = evolve_ensemble(ens, prop, {0.0, 0.25, 0.7}, 1);
    FieldState manual = ens.states.col(1);
    size_t si = 0;
    for (int step = 0; step <= 70; ++step) {
        if (si < snaps.states.size() &&
            step == static_cast<int>(std::llround(snaps.times[si] / 0.01))) {
            CHECK((snaps.states[si].col(1) - manual).cwiseAbs().maxCoeff() < 1e-15);
            ++si;
        }
        manual = strang_step(manual, prop);
    }
    CHECK(si == snaps.states.size());
}
