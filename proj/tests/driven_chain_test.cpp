#include <doctest.h>

#include <cmath>

#include "bhpc/driven_chain.hpp"

using namespace bhpc;

namespace {

DrivenChainSpec spec_l(int l, double gamma, double n_l = 1.0, double n_r = 0.5) {
    DrivenChainSpec s;
    s.l = l;
    s.j_hop = 1.0;
    s.gamma_l = gamma;
    s.gamma_r = gamma;
    s.n_l = n_l;
    s.n_r = n_r;
    return s;
}

}  // namespace

TEST_CASE("steady covariance reproduces the frozen three-site reference") {
    // Independently computed with an 80-bit dense solver for
    // L=3, J=1, Gamma=0.07, n_l=1, n_r=0.5.
    SteadyCovariance sc = steady_covariance(spec_l(3, 0.07));
    CHECK(sc.current == doctest::Approx(0.0174146681261817).epsilon(1e-12));
    CHECK(sc.sigma(0, 0).real() == doctest::Approx(0.75121903).epsilon(1e-6));
    CHECK(sc.sigma(1, 1).real() == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(sc.sigma(2, 2).real() == doctest::Approx(0.74878097).epsilon(1e-6));
    CHECK((sc.sigma - sc.sigma.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("boundary inflow, internal bonds, and the closed form agree for L >= 2") {
    for (int l : {2, 3, 5}) {
        for (double gamma : {0.05, 0.5, 1.0, 3.0}) {
            DrivenChainSpec s = spec_l(l, gamma);
            SteadyCovariance sc = steady_covariance(s);
            double expect = analytic_current(s);
            CHECK(sc.current == doctest::Approx(expect).epsilon(1e-10));
            REQUIRE(int(sc.bond_currents.size()) == l - 1);
            for (double jb : sc.bond_currents)
                CHECK(jb == doctest::Approx(sc.current).epsilon(1e-10));
        }
    }
}

TEST_CASE("a single-site junction transmits Gamma (n_l - n_r) / 2, not the closed form") {
    // With one site there is no internal bond: the site relaxes to the mean
    // density and each reservoir exchanges Gamma * dn / 2 regardless of J.
    for (double gamma : {0.07, 0.5, 2.0}) {
        SteadyCovariance sc = steady_covariance(spec_l(1, gamma));
        CHECK(sc.sigma(0, 0).real() == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(sc.current == doctest::Approx(gamma * 0.25).epsilon(1e-12));
        CHECK(sc.bond_currents.empty());
    }
    // The L-independent closed form disagrees with the exact L=1 solution
    // whenever J^2/(J^2+Gamma^2) != 1/2; at Gamma=0.5 the gap is 20%.
    DrivenChainSpec s = spec_l(1, 0.5);
    CHECK(std::abs(steady_covariance(s).current - analytic_current(s)) > 1e-2);
}

TEST_CASE("equal reservoir densities give the uniform equilibrium state") {
    DrivenChainSpec s = spec_l(4, 0.3, 0.8, 0.8);
    SteadyCovariance sc = steady_covariance(s);
    CHECK((sc.sigma - 0.8 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(sc.current) < 1e-13);
}

TEST_CASE("current is antisymmetric under swapping the reservoirs") {
    SteadyCovariance fwd = steady_covariance(spec_l(3, 0.4, 1.0, 0.5));
    SteadyCovariance bwd = steady_covariance(spec_l(3, 0.4, 0.5, 1.0));
    CHECK(fwd.current == doctest::Approx(-bwd.current).epsilon(1e-12));
}

TEST_CASE("current response is maximal at Gamma = J") {
    double at_max = steady_covariance(spec_l(3, 1.0)).current;
    CHECK(at_max > steady_covariance(spec_l(3, 0.5)).current);
    CHECK(at_max > steady_covariance(spec_l(3, 2.0)).current);
    // J^2 Gamma/(J^2+Gamma^2) = 1/2 at Gamma = J, times dn/2 = 0.25.
    CHECK(at_max == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("invalid driven-chain parameters are rejected") {
    CHECK_THROWS(steady_covariance(spec_l(0, 0.5)));
    DrivenChainSpec no_rate = spec_l(3, 0.5);
    no_rate.gamma_r = 0.0;
    CHECK_THROWS(steady_covariance(no_rate));
    DrivenChainSpec neg_density = spec_l(3, 0.5);
    neg_density.n_r = -0.1;
    CHECK_THROWS(steady_covariance(neg_density));
    DrivenChainSpec uneven = spec_l(3, 0.5);
    uneven.gamma_r = 0.6;
    CHECK_THROWS(analytic_current(uneven));
    CHECK_NOTHROW(steady_covariance(uneven));
}
