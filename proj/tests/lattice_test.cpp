#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>

#include "bhpc/lattice.hpp"

using namespace bhpc;

TEST_CASE("ring layout is a cycle graph") {
    SiteGraph g = build_layout(LayoutSpec::ring(20, 1.0, 0.4));
    CHECK(g.n_sites == 20);
    CHECK(g.bonds.size() == 20);
    std::vector<int> degree(20, 0);
    for (const auto& b : g.bonds) {
        ++degree[b.i];
        ++degree[b.j];
        CHECK(b.hop == 1.0);
    }
    for (int d : degree) CHECK(d == 2);
    CHECK(g.region_sites(Region::Whole).size() == 20);
    CHECK(g.g_site.minCoeff() == 0.4);
    CHECK(g.g_site.maxCoeff() == 0.4);
}

TEST_CASE("two rings joined at a point") {
    SiteGraph g = build_layout(LayoutSpec::two_rings_point(20, 0.25));
    CHECK(g.n_sites == 40);
    CHECK(g.bonds.size() == 41);
    int weak = 0;
    for (const auto& b : g.bonds)
        if (b.hop == 0.25) ++weak;
    CHECK(weak == 1);
    CHECK(g.junction_bonds.size() == 1);
    CHECK(g.bonds[g.junction_bonds[0]].hop == 0.25);
    CHECK(g.region_sites(Region::LeftRing).size() == 20);
    CHECK(g.region_sites(Region::RightRing).size() == 20);
}

TEST_CASE("two rings bridged by a chain") {
    SiteGraph g = build_layout(LayoutSpec::two_rings_chain(40, 3, 0.1, 1.0, 0.4, 0.0));
    CHECK(g.n_sites == 83);
    int weak = 0;
    for (const auto& b : g.bonds)
        if (b.hop == 0.1) ++weak;
    CHECK(weak == 2);
    for (int s : g.region_sites(Region::Chain)) CHECK(g.g_site[s] == 0.0);
    for (int s : g.region_sites(Region::LeftRing)) CHECK(g.g_site[s] == 0.4);
    // ring bonds + chain internal bonds + two junctions
    CHECK(g.bonds.size() == 40 + 40 + 2 + 2);
}

TEST_CASE("degenerate chain length collapses to the point contact") {
    SiteGraph g = build_layout(LayoutSpec::two_rings_chain(10, 0, 0.5));
    CHECK(g.n_sites == 20);
    CHECK(g.junction_bonds.size() == 1);
    CHECK(g.region_sites(Region::Chain).empty());
}

TEST_CASE("layout validation rejects bad sizes") {
    CHECK_THROWS(build_layout(LayoutSpec::ring(2)));
    CHECK_THROWS(build_layout(LayoutSpec::two_rings_point(20, 0.0)));
    CHECK_THROWS(build_layout(LayoutSpec::two_rings_point(20, 1.5)));
    CHECK_THROWS(build_layout(LayoutSpec::two_rings_chain(20, -1, 0.1)));
}

TEST_CASE("hopping matrix of Ring(4) has spectrum {-1, 0, 0, 1}") {
    SiteGraph g = build_layout(LayoutSpec::ring(4));
    Eigen::MatrixXd h = hopping_matrix(g);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ring spectrum matches the dispersion relation") {
    // Sorted eigenvalues of the circulant hopping matrix against -J cos(2 pi k / M).
    const int m = 20;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hopping_matrix(g));
    std::vector<double> expected;
    for (int k = 0; k < m; ++k) expected.push_back(-std::cos(2.0 * M_PI * k / m));
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < m; ++k)
        CHECK(es.eigenvalues()[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("classical energy of simple states") {
    SiteGraph g = build_layout(LayoutSpec::ring(10, 1.0, 0.4));
    FieldState zero = FieldState::Zero(10);
    auto e0 = classical_energy(g, zero);
    CHECK(e0.total == 0.0);

    FieldState ones = FieldState::Constant(10, 1.0);
    auto e1 = classical_energy(g, ones);
    CHECK(e1.kinetic == doctest::Approx(-10.0).epsilon(1e-14));
    CHECK(e1.potential == doctest::Approx(0.2 * 10).epsilon(1e-14));
}

TEST_CASE("plane wave energies per site are -J cos(kappa) and g/2") {
    const int m = 12;
    const double g_int = 0.4;
    SiteGraph g = build_layout(LayoutSpec::ring(m, 1.0, g_int));
    const double kappa = 2.0 * M_PI * 2 / m;
    FieldState a(m);
    for (int l = 0; l < m; ++l)
        a[l] = std::polar(1.0, kappa * l);
    auto e = classical_energy(g, a);
    CHECK(e.kinetic / m == doctest::Approx(-std::cos(kappa)).epsilon(1e-12));
    CHECK(e.potential / m == doctest::Approx(g_int / 2).epsilon(1e-12));
}

TEST_CASE("classical energy is invariant under a global phase") {
    SiteGraph g = build_layout(LayoutSpec::ring(8, 1.0, 0.7));
    FieldState a(8);
    for (int l = 0; l < 8; ++l) a[l] = std::complex<double>(0.3 * l, 1.0 - 0.1 * l);
    auto e1 = classical_energy(g, a);
    auto e2 = classical_energy(g, FieldState(std::polar(1.0, 0.813) * a));
    CHECK(e1.total == doctest::Approx(e2.total).epsilon(1e-13));
    CHECK(e1.kinetic == doctest::Approx(e2.kinetic).epsilon(1e-13));
}

TEST_CASE("removing junction bonds decouples the energy exactly") {
    SiteGraph joined = build_layout(LayoutSpec::two_rings_chain(6, 2, 0.3, 1.0, 0.5, 0.0));
    FieldState a(joined.n_sites);
    for (int l = 0; l < joined.n_sites; ++l)
        a[l] = std::complex<double>(std::sin(0.9 * l + 0.2), std::cos(1.7 * l));

    SiteGraph cut = joined;
    std::vector<Bond> kept;
    for (int bi = 0; bi < static_cast<int>(cut.bonds.size()); ++bi)
        if (std::find(cut.junction_bonds.begin(), cut.junction_bonds.end(), bi) ==
            cut.junction_bonds.end())
            kept.push_back(cut.bonds[bi]);
    cut.bonds = kept;
    cut.junction_bonds.clear();

    double junction_part = 0.0;
    for (int bi : joined.junction_bonds) {
        const Bond& b = joined.bonds[bi];
        junction_part -= b.hop * (std::conj(a[b.i]) * a[b.j]).real();
    }
    CHECK(classical_energy(joined, a).total ==
          doctest::Approx(classical_energy(cut, a).total + junction_part).epsilon(1e-13));
}

TEST_CASE("validate_graph catches broken invariants") {
    SiteGraph g = build_layout(LayoutSpec::ring(5));
    SiteGraph dup = g;
    dup.bonds.push_back(dup.bonds.front());
    CHECK_THROWS(validate_graph(dup));
    SiteGraph self = g;
    self.bonds.push_back({2, 2, 1.0});
    CHECK_THROWS(validate_graph(self));
    SiteGraph uncovered = g;
    uncovered.regions[Region::Whole].pop_back();
    CHECK_THROWS(validate_graph(uncovered));
}
