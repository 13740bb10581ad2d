#include "phonon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "phonon/data.hpp"
#include "phonon/errors.hpp"
#include "phonon/parallel.hpp"

namespace phonon {

std::vector<double> fd_gradient(const ScalarOfEta& f, const ReflectionCoeff& eta, double h, std::size_t jobs) {
    if (!(h > 0.0)) throw DomainError("fd_gradient: step must be positive");
    const std::size_t n = eta.size();
    const std::vector<double> base(eta.values().begin(), eta.values().end());
    std::vector<double> grad(n, 0.0);
    parallel_for(n, jobs, [&](std::size_t m) {
        const double room_up = 1.0 - base[m];
        const double room_down = base[m];
        const double step = std::min({h, room_up, room_down});
        auto shifted = [&](double delta) {
            auto v = base;
            v[m] += delta;
            return f(ReflectionCoeff(std::move(v)));
        };
        if (step > 1e-3 * h) {
            grad[m] = (shifted(step) - shifted(-step)) / (2.0 * step);
        } else if (room_up >= room_down) {
            grad[m] = (shifted(h) - f(ReflectionCoeff(base))) / h;
        } else {
            grad[m] = (f(ReflectionCoeff(base)) - shifted(-h)) / h;
        }
    });
    return grad;
}

std::vector<double> fd_gradient(const InverseProblem& problem, const ReflectionCoeff& eta, Gamma gamma, double h,
                                std::size_t jobs) {
    if (gamma.i >= problem.bank.I() || gamma.j >= problem.bank.J()) {
        throw StructuralError("fd_gradient: gamma outside the experiment bank");
    }
    const auto& phi = problem.bank.phis[gamma.i];
    const auto& psi = problem.bank.psis[gamma.j];
    return fd_gradient(
        [&](const ReflectionCoeff& e) { return measurement(problem.grid, problem.table, e, phi, psi); }, eta, h,
        jobs);
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw StructuralError("relative_l2: size mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        num += (a[q] - b[q]) * (a[q] - b[q]);
        den += b[q] * b[q];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

GradientCheckReport gradient_check(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                                   const BoundarySource& phi, const MeasurementFunctional& psi, double h,
                                   std::size_t jobs) {
    GradientCheckReport r;
    r.h = h;
    r.grid = grid.describe();
    const auto mg = measurement_gradient(grid, table, eta, phi, psi, jobs > 1);
    r.adjoint = nodal_gradient(grid, mg.density);
    r.fd = fd_gradient([&](const ReflectionCoeff& e) { return measurement(grid, table, e, phi, psi); }, eta, h, jobs);
    r.rel_l2_error = relative_l2(r.adjoint, r.fd);
    return r;
}

ConvexityReport convexity_sweep(const PhaseGrid& grid, const MaxwellianTable& table, const BoundarySource& phi,
                                const ReflectionCoeff& eta1, const ReflectionCoeff& eta2,
                                const std::vector<double>& alphas) {
    if (eta1.size() != grid.nomega() || eta2.size() != grid.nomega()) {
        throw StructuralError("convexity_sweep: eta size != nomega");
    }
    for (std::size_t m = 0; m < eta1.size(); ++m)
        if (eta1[m] < eta2[m]) throw DomainError("convexity_sweep: requires eta1 >= eta2 pointwise");

    ForwardOptions opts;
    opts.store_trajectory = true;
    const auto s1 = forward_solve(grid, table, eta1, phi, opts);
    const auto s2 = forward_solve(grid, table, eta2, phi, opts);

    ConvexityReport r;
    r.monotone_gap = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < grid.n_levels(); ++n) {
        const auto a = s1.trajectory[n].values();
        const auto b = s2.trajectory[n].values();
        for (std::size_t q = 0; q < a.size(); ++q) r.monotone_gap = std::min(r.monotone_gap, a[q] - b[q]);
    }

    r.worst_margin = std::numeric_limits<double>::infinity();
    for (double alpha : alphas) {
        if (alpha < 0.0 || alpha > 1.0) throw DomainError("convexity_sweep: alpha outside [0, 1]");
        std::vector<double> blend(grid.nomega());
        for (std::size_t m = 0; m < blend.size(); ++m) blend[m] = alpha * eta1[m] + (1.0 - alpha) * eta2[m];
        const auto sb = forward_solve(grid, table, ReflectionCoeff::projected(std::move(blend)), phi);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < grid.n_levels(); ++n) {
            const double mix = alpha * s1.surface_deltaT[n] + (1.0 - alpha) * s2.surface_deltaT[n];
            margin = std::min(margin, mix - sb.surface_deltaT[n]);
        }
        r.margin_per_alpha.push_back(margin);
        r.worst_margin = std::min(r.worst_margin, margin);
    }
    return r;
}

namespace {

std::vector<double> random_slice(const PhaseGrid& grid, std::mt19937_64& rng) {
    std::vector<double> v(grid.slice_size());
    for (double& x : v) x = uniform_pm1(rng);
    return v;
}

double sup(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

double selfadjoint_probe(const PhaseGrid& grid, const MaxwellianTable& table, std::size_t trials,
                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t nw = grid.nomega();
    const auto gstar = table.gstar();
    auto weighted = [&](const std::vector<double>& lf, const std::vector<double>& other) {
        std::vector<double> prod(lf.size());
        for (std::size_t q = 0; q < lf.size(); ++q) prod[q] = lf[q] * other[q] / gstar[q % nw];
        return grid.bracket(prod);
    };
    double worst = 0.0;
    std::vector<double> lg(grid.slice_size());
    std::vector<double> lh(grid.slice_size());
    for (std::size_t t = 0; t < trials; ++t) {
        const auto g = random_slice(grid, rng);
        const auto h = random_slice(grid, rng);
        collide(grid, table, g, lg);
        collide(grid, table, h, lh);
        const double d = std::abs(weighted(lg, h) - weighted(lh, g)) / (sup(g) * sup(h));
        worst = std::max(worst, d);
    }
    return worst;
}

double conservation_probe(const PhaseGrid& grid, const MaxwellianTable& table, std::size_t trials,
                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    std::vector<double> lg(grid.slice_size());
    for (std::size_t t = 0; t < trials; ++t) {
        const auto g = random_slice(grid, rng);
        collide(grid, table, g, lg);
        worst = std::max(worst, std::abs(grid.bracket(lg)) / sup(g));
    }
    return worst;
}

double lipschitz_probe(const PhaseGrid& grid, const MaxwellianTable& table, const BoundarySource& phi,
                       const MeasurementFunctional& psi, std::size_t pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
        std::vector<double> e1(grid.nomega());
        std::vector<double> e2(grid.nomega());
        for (double& v : e1) v = 0.5 * (uniform_pm1(rng) + 1.0);
        for (double& v : e2) v = 0.5 * (uniform_pm1(rng) + 1.0);
        const double dist = reconstruction_error(e1, e2);
        if (dist == 0.0) continue;
        const auto g1 = measurement_gradient(grid, table, ReflectionCoeff(e1), phi, psi).density;
        const auto g2 = measurement_gradient(grid, table, ReflectionCoeff(e2), phi, psi).density;
        worst = std::max(worst, reconstruction_error(g1, g2) / dist);
    }
    return worst;
}

double equilibrium_deviation(const PhaseGrid& grid, const MaxwellianTable& table) {
    const auto gstar = table.gstar();
    ForwardOptions opts;
    opts.store_trajectory = true;
    opts.initial = KineticField::broadcast(grid, gstar);
    const auto phi = BoundarySource::from_profile(grid, gstar);
    const auto sol = forward_solve(grid, table, ReflectionCoeff::constant(grid, 1.0), phi, opts);
    const std::size_t nw = grid.nomega();
    double worst = 0.0;
    for (const auto& g : sol.trajectory) {
        const auto v = g.values();
        for (std::size_t q = 0; q < v.size(); ++q) worst = std::max(worst, std::abs(v[q] - gstar[q % nw]));
    }
    return worst;
}

GridCounts refined_counts(const PhaseGrid& grid) {
    GridCounts c;
    c.x_max = grid.x_max();
    c.t_max = grid.t_max();
    c.omega_max = grid.omega_max();
    c.omega_min = grid.omega_min() - 0.5 * grid.domega();
    c.nx = 2 * grid.nx();
    c.nmu = 2 * grid.nmu();
    c.nomega = 2 * grid.nomega();
    c.nt = 2 * grid.nt();
    return c;
}

}  // namespace phonon
