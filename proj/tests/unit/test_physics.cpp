#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "phonon/errors.hpp"
#include "phonon/field.hpp"
#include "phonon/oracle.hpp"
#include "phonon/physics.hpp"

using namespace phonon;

TEST_CASE("g* values") {
    const double e = std::exp(1.0);
    CHECK(gstar_at(1.0) == doctest::Approx(e / ((e - 1) * (e - 1))).epsilon(1e-14));
    CHECK(gstar_at(1.0) == doctest::Approx(0.92067).epsilon(1e-5));
    const double e2 = std::exp(2.0);
    CHECK(gstar_at(2.0) == doctest::Approx(4 * e2 / ((e2 - 1) * (e2 - 1))).epsilon(1e-14));
    CHECK(gstar_at(2.0) == doctest::Approx(0.72399).epsilon(1e-4));
    CHECK(gstar_at(1e-8) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gstar_at(1e-5) == doctest::Approx(1.0 - 1e-10 / 12).epsilon(1e-14));
    CHECK(gstar_at(700.0) >= 0.0);
    CHECK_THROWS_AS(gstar_at(0.0), DomainError);
    CHECK_THROWS_AS(gstar_at(-1.0), DomainError);
}

TEST_CASE("temperature of scaled equilibrium") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    std::vector<double> s(g.slice_size());
    for (std::size_t q = 0; q < s.size(); ++q) s[q] = t.gstar()[q % g.nomega()];
    CHECK(delta_T(g, t, s) == doctest::Approx(1.0).epsilon(1e-14));
    for (double& v : s) v *= -3.5;
    CHECK(delta_T(g, t, s) == doctest::Approx(-3.5).epsilon(1e-14));
    std::fill(s.begin(), s.end(), 0.0);
    CHECK(delta_T(g, t, s) == 0.0);
}

TEST_CASE("delta_T is linear") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> a(g.slice_size()), b(g.slice_size()), c(g.slice_size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        a[q] = u(rng);
        b[q] = u(rng);
        c[q] = 0.3 * a[q] + 1.7 * b[q];
    }
    CHECK(delta_T(g, t, c) == doctest::Approx(0.3 * delta_T(g, t, a) + 1.7 * delta_T(g, t, b)).epsilon(1e-13));
}

TEST_CASE("collision annihilates equilibrium and conserves energy") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    const auto eq = KineticField::broadcast(g, t.gstar());
    CHECK(collide(g, t, eq).sup_norm() <= 1e-12);
    const KineticField zero(g);
    CHECK(collide(g, t, zero).sup_norm() == 0.0);
    CHECK(conservation_probe(g, t, 100, 11) <= 1e-12);
}

TEST_CASE("collision is self-adjoint with weight 1/g*") {
    const auto g = test::coarse_grid();
    const MaxwellianTable t(g);
    CHECK(selfadjoint_probe(g, t, 100, 5) <= 1e-12);
    CHECK(selfadjoint_probe(g, t, 0, 5) == 0.0);

    // g = g*: both sides vanish.
    std::vector<double> s(g.slice_size());
    for (std::size_t q = 0; q < s.size(); ++q) s[q] = t.gstar()[q % g.nomega()];
    std::vector<double> out(s.size());
    collide(g, t, s, out);
    for (double v : out) CHECK(std::abs(v) <= 1e-14);
}
