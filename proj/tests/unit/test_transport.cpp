#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "phonon/errors.hpp"
#include "phonon/inverse.hpp"
#include "phonon/oracle.hpp"
#include "phonon/transport.hpp"

using namespace phonon;

TEST_CASE("zero inflow gives zero dynamics") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    ForwardOptions opts;
    opts.store_trajectory = true;
    const auto s = forward_solve(g, t, ReflectionCoeff::constant(g, 0.7), BoundarySource(g), opts);
    for (double v : s.surface_deltaT) CHECK(v == 0.0);
    for (const auto& f : s.trajectory) CHECK(f.sup_norm() == 0.0);
    const auto mp = max_principle_check(s, BoundarySource(g), 10.0);
    CHECK(mp.trivial);
    CHECK(mp.pass());
}

TEST_CASE("equilibrium is a fixed point") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    CHECK(equilibrium_deviation(g, t) <= 1e-12);
}

TEST_CASE("linearity in phi") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    const auto eta = eta_from_params({1.5, 1.0}, g);
    const auto p1 = BoundarySource::kronecker(g, 7);
    const auto p2 = BoundarySource::from_profile(g, t.gstar());
    ForwardOptions opts;
    opts.store_trajectory = true;
    const auto a = forward_solve(g, t, eta, p1, opts);
    const auto b = forward_solve(g, t, eta, p2, opts);
    const auto c = forward_solve(g, t, eta, p1.scaled(1.5).plus(p2.scaled(-0.5)), opts);
    double worst = 0.0;
    for (std::size_t n = 0; n < g.n_levels(); ++n) {
        const auto va = a.trajectory[n].values();
        const auto vb = b.trajectory[n].values();
        const auto vc = c.trajectory[n].values();
        for (std::size_t q = 0; q < va.size(); ++q) worst = std::max(worst, std::abs(vc[q] - 1.5 * va[q] + 0.5 * vb[q]));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("max principle ratio is scale invariant and the solution stays nonnegative") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    const auto eta = eta_from_params({1.5, 1.0}, g);
    const auto phi = BoundarySource::kronecker(g, 14);
    const auto s1 = forward_solve(g, t, eta, phi);
    const auto s10 = forward_solve(g, t, eta, phi.scaled(10.0));
    const auto r1 = max_principle_check(s1, phi, 10.0);
    const auto r10 = max_principle_check(s10, phi.scaled(10.0), 10.0);
    CHECK(r1.pass());
    CHECK(r10.ratio == doctest::Approx(r1.ratio).epsilon(1e-13));
    CHECK(s1.min_value >= -1e-12);
    CHECK(s1.sup_norm <= 1.0 + 1e-12);
}

TEST_CASE("positivity on the default grid at CFL 1") {
    const auto g = PhaseGrid::make(GridSpacing{});
    const MaxwellianTable t(g);
    // omega_max is the ordinate with the largest Courant number.
    const auto s = forward_solve(g, t, ReflectionCoeff::constant(g, 1.0), BoundarySource::kronecker(g, g.nomega() - 1));
    CHECK(s.min_value >= -1e-12);
}

TEST_CASE("monotone in eta") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    const auto phi = BoundarySource::kronecker(g, 14);
    const auto r = convexity_sweep(g, t, phi, ReflectionCoeff::constant(g, 0.8), eta_from_params({1.5, 1.0}, g), {0.5});
    CHECK(r.monotone_gap >= -1e-12);
    CHECK(r.worst_margin >= -1e-10);
}

TEST_CASE("reflection reaches the surface only after a round trip") {
    const auto g = PhaseGrid::make(GridSpacing{});
    const MaxwellianTable t(g);
    const auto phi = BoundarySource::kronecker(g, g.omega_index(1.5));
    ForwardOptions opts;
    opts.snapshot_levels = {g.nearest_level(0.5), g.nearest_level(1.0), g.nearest_level(3.0)};
    const auto refl = forward_solve(g, t, eta_from_params({1.5, 1.0}, g), phi, opts);
    const auto absorb = forward_solve(g, t, ReflectionCoeff::constant(g, 0.0), phi);

    // Upwind moves information one cell per step, so nothing can come back before 2 nx steps.
    for (std::size_t n = 0; n < 2 * g.nx() - 1; ++n) CHECK(refl.surface_deltaT[n] == absorb.surface_deltaT[n]);
    CHECK(refl.surface_deltaT[g.nearest_level(1.5)] > absorb.surface_deltaT[g.nearest_level(1.5)]);

    // Collisions feed frequencies other than the injected one.
    const std::size_t m0 = g.omega_index(1.5);
    double prev = -1.0;
    for (const auto& [level, f] : refl.snapshots) {
        const auto per_omega = integrate_mu(g, f);
        double other = 0.0;
        for (std::size_t i = 0; i < g.nx(); ++i)
            for (std::size_t m = 0; m < g.nomega(); ++m)
                if (m != m0) other += per_omega[i * g.nomega() + m];
        CHECK(other > prev);
        prev = other;
    }
}

TEST_CASE("surface functional of a Kronecker measurement picks one level") {
    const auto g = test::tiny_grid();
    std::vector<double> dT(g.n_levels());
    for (std::size_t n = 0; n < dT.size(); ++n) dT[n] = static_cast<double>(n);
    std::vector<double> psi(g.n_levels(), 0.0);
    psi[17] = 1.0 / g.dt();
    CHECK(surface_functional(g, dT, psi) == doctest::Approx(17.0));
    std::vector<double> bad(3);
    CHECK_THROWS_AS(surface_functional(g, dT, bad), StructuralError);
}

TEST_CASE("shape mismatches are structural errors") {
    const auto g = test::tiny_grid();
    const auto c = test::coarse_grid();
    const MaxwellianTable t(g);
    CHECK_THROWS_AS(forward_solve(g, t, ReflectionCoeff::constant(c, 0.5), BoundarySource(g)), StructuralError);
    CHECK_THROWS_AS(forward_solve(g, t, ReflectionCoeff::constant(g, 0.5), BoundarySource(c)), StructuralError);
    CHECK_THROWS_AS(ReflectionCoeff(std::vector<double>{0.5, 1.2}), DomainError);
    CHECK(ReflectionCoeff::projected({-0.5, 1.2, 0.3}) == ReflectionCoeff(std::vector<double>{0.0, 1.0, 0.3}));
}
