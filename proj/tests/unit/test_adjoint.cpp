#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "phonon/adjoint.hpp"
#include "phonon/inverse.hpp"
#include "phonon/oracle.hpp"

using namespace phonon;

namespace {

struct Setup {
    PhaseGrid g = test::tiny_grid();
    MaxwellianTable t{g};
    ReflectionCoeff eta = eta_from_params({1.5, 1.0}, g);
    BoundarySource phi = BoundarySource::kronecker(g, 5);
    MeasurementFunctional psi = MeasurementFunctional::kronecker_level(g, g.nt());
};

}  // namespace

TEST_CASE("zero measurement gives a zero adjoint and zero gradient") {
    Setup s;
    AdjointOptions o;
    o.store_trajectory = true;
    const MeasurementFunctional zero(s.g, std::vector<double>(s.g.n_levels(), 0.0));
    const auto adj = adjoint_solve(s.g, s.t, s.eta, zero, o);
    for (const auto& h : adj.trajectory) CHECK(h.sup_norm() == 0.0);
    const auto fwd = forward_solve(s.g, s.t, s.eta, s.phi);
    for (double v : frechet_gradient(s.g, s.t, fwd, adj)) CHECK(v == 0.0);
}

TEST_CASE("zero inflow gives a zero gradient") {
    Setup s;
    const auto mg = measurement_gradient(s.g, s.t, s.eta, BoundarySource(s.g), s.psi);
    CHECK(mg.value == 0.0);
    for (double v : mg.density) CHECK(v == 0.0);
}

TEST_CASE("terminal measurement: zero at t_max, alive just before near the surface") {
    Setup s;
    AdjointOptions o;
    o.store_trajectory = true;
    const auto adj = adjoint_solve(s.g, s.t, s.eta, s.psi, o);
    CHECK(adj.trajectory[s.g.nt()].sup_norm() == 0.0);
    const auto& h = adj.trajectory[s.g.nt() - 1];
    double near_surface = 0.0;
    for (std::size_t k = 0; k < s.g.half(); ++k)
        for (std::size_t m = 0; m < s.g.nomega(); ++m) near_surface = std::max(near_surface, std::abs(h(0, k, m)));
    CHECK(near_surface > 0.0);
}

TEST_CASE("interface demo source propagates backward") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    AdjointOptions o;
    o.boundary = AdjointBoundary::interface_demo;
    o.store_trajectory = true;
    const auto adj =
        adjoint_solve(g, t, eta_from_params({1.5, 1.0}, g), MeasurementFunctional::kronecker_level(g, g.nt()), o);
    CHECK(adj.trajectory[g.nt()].sup_norm() == 0.0);
    CHECK(adj.trajectory[g.nt() - 1].sup_norm() > 0.0);
    // Injected at the interface: the surface cell stays untouched for the first steps.
    const auto& h = adj.trajectory[g.nt() - 1];
    for (std::size_t k = 0; k < g.nmu(); ++k)
        for (std::size_t m = 0; m < g.nomega(); ++m) CHECK(h(0, k, m) == 0.0);
    CHECK(demo_interface_profile(0.1) == doctest::Approx(std::exp(1.0) / std::pow(std::exp(1.0) - 1, 2)));
}

TEST_CASE("adjoint gradient matches finite differences") {
    Setup s;
    const auto r = gradient_check(s.g, s.t, s.eta, s.phi, s.psi, 1e-3);
    CHECK(r.rel_l2_error <= 1e-6);
    CHECK(r.adjoint.size() == s.g.nomega());
}

TEST_CASE("gradient is linear in phi and in psi") {
    Setup s;
    const auto phi2 = BoundarySource::kronecker(s.g, 8);
    const auto psi2 = MeasurementFunctional::kronecker_level(s.g, 30);
    const auto a = measurement_gradient(s.g, s.t, s.eta, s.phi, s.psi).density;
    const auto b = measurement_gradient(s.g, s.t, s.eta, phi2, s.psi).density;
    const auto c = measurement_gradient(s.g, s.t, s.eta, s.phi.scaled(2.0).plus(phi2.scaled(3.0)), s.psi).density;
    const auto d = measurement_gradient(s.g, s.t, s.eta, s.phi, psi2).density;
    std::vector<double> mix(s.g.n_levels());
    for (std::size_t n = 0; n < mix.size(); ++n) mix[n] = 0.5 * s.psi[n] - 4.0 * psi2[n];
    const auto e = measurement_gradient(s.g, s.t, s.eta, s.phi, MeasurementFunctional(s.g, mix)).density;
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t m = 0; m < a.size(); ++m) {
        CHECK(std::abs(c[m] - 2.0 * a[m] - 3.0 * b[m]) <= 1e-12 * scale);
        CHECK(std::abs(e[m] - 0.5 * a[m] + 4.0 * d[m]) <= 1e-12 * scale);
    }
}

TEST_CASE("linearization remainder is second order") {
    Setup s;
    const auto mg = measurement_gradient(s.g, s.t, s.eta, s.phi, s.psi);
    const auto nodal = nodal_gradient(s.g, mg.density);
    auto remainder = [&](double h) {
        std::vector<double> e(s.eta.values().begin(), s.eta.values().end());
        double lin = 0.0;
        for (std::size_t m = 0; m < e.size(); ++m) {
            const double d = h * std::cos(static_cast<double>(m));
            e[m] += d;
            lin += nodal[m] * d;
        }
        return std::abs(measurement(s.g, s.t, ReflectionCoeff(e), s.phi, s.psi) - mg.value - lin);
    };
    CHECK(remainder(0.1) / remainder(0.05) >= 1.9);
}

TEST_CASE("more reflection never lowers the terminal surface temperature") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    const auto mg = measurement_gradient(g, t, eta_from_params({1.5, 1.0}, g),
                                         BoundarySource::kronecker(g, g.omega_index(1.5)),
                                         MeasurementFunctional::kronecker_level(g, g.nt()));
    for (double v : mg.density) CHECK(v >= -1e-10);
}

TEST_CASE("mollified surface factor") {
    const auto g = test::coarse_grid();
    const auto plain = surface_mu_factor(g, 0.0);
    const auto soft = surface_mu_factor(g, 0.05);
    for (std::size_t k = 0; k < g.half(); ++k) {
        CHECK(std::isfinite(soft[k]));
        CHECK(plain[k] == doctest::Approx(1.0 / g.mu(k)));
    }
    CHECK(soft[0] == doctest::Approx(plain[0]).epsilon(0.05));
    // Smoothing pulls the most singular ordinate toward its neighbours.
    CHECK(std::abs(soft[g.half() - 1]) < std::abs(plain[g.half() - 1]));
}

TEST_CASE("measurement functional construction") {
    const auto g = test::tiny_grid();
    const auto k = MeasurementFunctional::kronecker(g, 1.0);
    CHECK(k[g.nt()] == doctest::Approx(1.0 / g.dt()));
    CHECK(MeasurementFunctional(g, std::vector<double>(g.n_levels(), 0.0)).is_zero());
}
