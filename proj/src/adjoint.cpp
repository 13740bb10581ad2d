#include "phonon/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

MeasurementFunctional::MeasurementFunctional(const PhaseGrid& grid, std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.size() != grid.n_levels()) throw StructuralError("measurement functional: length != time levels");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("measurement functional: non-finite value");
}

MeasurementFunctional MeasurementFunctional::kronecker(const PhaseGrid& grid, double t_j) {
    return kronecker_level(grid, grid.nearest_level(t_j));
}

MeasurementFunctional MeasurementFunctional::kronecker_level(const PhaseGrid& grid, std::size_t level) {
    if (level > grid.nt()) throw StructuralError("measurement functional: level beyond t_max");
    std::vector<double> v(grid.n_levels(), 0.0);
    v[level] = 1.0 / grid.dt();
    return MeasurementFunctional(grid, std::move(v));
}

MeasurementFunctional MeasurementFunctional::scaled(double factor) const {
    MeasurementFunctional out = *this;
    for (double& v : out.values_) v *= factor;
    return out;
}

bool MeasurementFunctional::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double demo_interface_profile(double omega) {
    const double z = 10.0 * omega;
    const double em1 = -std::expm1(-z);
    return z * z * z * std::exp(-z) / (em1 * em1);
}

std::vector<double> surface_mu_factor(const PhaseGrid& grid, double width) {
    const std::size_t half = grid.half();
    std::vector<double> inv(half);
    for (std::size_t k = 0; k < half; ++k) inv[k] = 1.0 / grid.mu(k);
    if (width <= 0.0) return inv;
    std::vector<double> out(half);
    for (std::size_t k = 0; k < half; ++k) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t l = 0; l < half; ++l) {
            const double d = (grid.mu(k) - grid.mu(l)) / width;
            const double w = std::exp(-0.5 * d * d);
            num += w * inv[l];
            den += w;
        }
        out[k] = num / den;
    }
    return out;
}

AdjointSolution adjoint_solve(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                              const MeasurementFunctional& psi, const AdjointOptions& opts) {
    if (grid.cfl() > 1.0 + 1e-12) throw ConfigError("adjoint_solve: CFL violation");
    if (eta.size() != grid.nomega()) throw StructuralError("adjoint_solve: eta size != nomega");
    if (psi.size() != grid.n_levels()) throw StructuralError("adjoint_solve: psi length != time levels");

    const std::size_t nx = grid.nx();
    const std::size_t nmu = grid.nmu();
    const std::size_t nw = grid.nomega();
    const std::size_t half = grid.half();
    const std::size_t nt = grid.nt();
    const double dt = grid.dt();
    const auto omega = grid.omega_nodes();
    const auto maxw = table.maxwellian();
    const auto gstar = table.gstar();

    std::vector<double> courant(nmu * nw);
    std::vector<double> keep(nmu * nw);
    for (std::size_t k = 0; k < nmu; ++k)
        for (std::size_t m = 0; m < nw; ++m) {
            const double c = std::abs(grid.mu(k)) * omega[m] * dt / grid.dx();
            courant[k * nw + m] = c;
            keep[k * nw + m] = 1.0 - c - omega[m] * dt;
        }

    // Boundary data per unit psi: surface inflow (mu < 0) and interface inflow (mu > 0).
    std::vector<double> surface_unit(half * nw, 0.0);
    std::vector<double> interface_unit(half * nw, 0.0);
    if (opts.boundary == AdjointBoundary::surface) {
        const auto inv_mu = surface_mu_factor(grid, opts.mollify_width);
        for (std::size_t k = 0; k < half; ++k)
            for (std::size_t m = 0; m < nw; ++m) surface_unit[k * nw + m] = gstar[m] * inv_mu[k];
    } else {
        for (std::size_t kp = 0; kp < half; ++kp)
            for (std::size_t m = 0; m < nw; ++m)
                interface_unit[kp * nw + m] =
                    demo_interface_profile(omega[m]) / (std::abs(grid.mu(half + kp)) * omega[m]);
    }
    double data_size = 0.0;
    for (std::size_t n = 0; n <= nt; ++n) {
        const double p = std::abs(psi[n]);
        for (double v : surface_unit) data_size = std::max(data_size, p * std::abs(v));
        for (double v : interface_unit) data_size = std::max(data_size, p * std::abs(v));
    }
    const double limit = opts.blowup_factor * data_size;

    AdjointSolution sol;
    sol.interface_trace.assign(grid.n_levels() * half * nw, 0.0);
    if (opts.store_trajectory) sol.trajectory.assign(grid.n_levels(), KineticField(grid));

    KineticField cur(grid);
    KineticField next(grid);
    std::vector<double> gain(nx);

    auto record = [&](std::size_t n) {
        double* tr = sol.interface_trace.data() + n * half * nw;
        for (std::size_t k = 0; k < half; ++k)
            for (std::size_t m = 0; m < nw; ++m) tr[k * nw + m] = cur(nx - 1, k, m);
        const double sup = cur.sup_norm();
        if (!(sup <= limit) && sup > 0.0) {
            std::ostringstream msg;
            msg << "adjoint_solve: blow-up at t=" << grid.t(n) << " (||h||=" << sup << ")";
            throw SolverError(msg.str());
        }
        if (!cur.all_finite()) throw SolverError("adjoint_solve: non-finite field");
        sol.sup_norm = std::max(sol.sup_norm, sup);
        if (opts.store_trajectory) sol.trajectory[n] = cur;
        if (std::find(opts.snapshot_levels.begin(), opts.snapshot_levels.end(), n) != opts.snapshot_levels.end()) {
            sol.snapshots.emplace(n, cur);
        }
    };

    record(nt);
    for (std::size_t step = nt; step-- > 0;) {
        // Advance from level step + 1 to level step; boundary data at the old level.
        const double p_old = psi[step + 1];
        for (std::size_t i = 0; i < nx; ++i) gain[i] = omega_moment(grid, cur.slice(i));

        for (std::size_t i = 0; i < nx; ++i) {
            const double src = dt * gain[i];
            for (std::size_t k = 0; k < nmu; ++k) {
                const bool positive = k >= half;
                const double* c = courant.data() + k * nw;
                const double* a = keep.data() + k * nw;
                const double* h = &cur(i, k, 0);
                double* out = &next(i, k, 0);
                if (!positive) {
                    // Moves towards +x in reversed time.
                    if (i == 0) {
                        const double* unit = surface_unit.data() + k * nw;
                        for (std::size_t m = 0; m < nw; ++m)
                            out[m] = a[m] * h[m] + c[m] * p_old * unit[m] + src * maxw[m];
                        continue;
                    }
                    const double* up = &cur(i - 1, k, 0);
                    for (std::size_t m = 0; m < nw; ++m) out[m] = a[m] * h[m] + c[m] * up[m] + src * maxw[m];
                } else {
                    if (i == nx - 1) {
                        const double* refl = &cur(nx - 1, grid.mirror(k), 0);
                        const double* unit = interface_unit.data() + (k - half) * nw;
                        for (std::size_t m = 0; m < nw; ++m)
                            out[m] = a[m] * h[m] + c[m] * (eta[m] * refl[m] + p_old * unit[m]) + src * maxw[m];
                        continue;
                    }
                    const double* up = &cur(i + 1, k, 0);
                    for (std::size_t m = 0; m < nw; ++m) out[m] = a[m] * h[m] + c[m] * up[m] + src * maxw[m];
                }
            }
        }
        std::swap(cur, next);
        record(step);
    }
    return sol;
}

std::vector<double> frechet_gradient(const PhaseGrid& grid, const MaxwellianTable& table,
                                     const ForwardSolution& fwd, const AdjointSolution& adj) {
    const std::size_t half = grid.half();
    const std::size_t nw = grid.nomega();
    const std::size_t expected = grid.n_levels() * half * nw;
    if (fwd.interface_trace.size() != expected || adj.interface_trace.size() != expected) {
        throw StructuralError("frechet_gradient: interface traces do not match the grid");
    }
    const auto omega = grid.omega_nodes();
    const auto gstar = table.gstar();
    std::vector<double> grad(nw, 0.0);
    for (std::size_t n = 0; n < grid.n_levels(); ++n) {
        const double* h = adj.interface_trace.data() + n * half * nw;
        const double* g = fwd.interface_trace.data() + n * half * nw;
        for (std::size_t k = 0; k < half; ++k) {
            // The outgoing forward half is stored as kp = mirror(k) - half.
            const std::size_t kp = grid.mirror(k) - half;
            const double mu = grid.mu(k);
            for (std::size_t m = 0; m < nw; ++m) grad[m] += mu * h[k * nw + m] * g[kp * nw + m];
        }
    }
    const double w = grid.weight_mu() * grid.dt() / table.z_norm();
    for (std::size_t m = 0; m < nw; ++m) grad[m] *= omega[m] / gstar[m] * w;
    return grad;
}

std::vector<double> nodal_gradient(const PhaseGrid& grid, std::span<const double> density) {
    if (density.size() != grid.nomega()) throw StructuralError("nodal_gradient: size != nomega");
    std::vector<double> out(density.begin(), density.end());
    for (double& v : out) v *= grid.weight_omega();
    return out;
}

}  // namespace phonon
