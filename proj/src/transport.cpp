#include "phonon/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

BoundarySource::BoundarySource(const PhaseGrid& grid)
    : half_size_(grid.half() * grid.nomega()), n_levels_(grid.n_levels()) {}

BoundarySource BoundarySource::kronecker(const PhaseGrid& grid, std::size_t omega_index) {
    if (omega_index >= grid.nomega()) throw StructuralError("kronecker source: omega index out of range");
    BoundarySource src(grid);
    std::vector<double> profile(src.half_size_, 0.0);
    for (std::size_t kp = 0; kp < grid.half(); ++kp) profile[kp * grid.nomega() + omega_index] = 1.0;
    src.add_term(std::move(profile), std::vector<double>(src.n_levels_, 1.0));
    return src;
}

BoundarySource BoundarySource::from_profile(const PhaseGrid& grid, std::span<const double> per_omega) {
    if (per_omega.size() != grid.nomega()) throw StructuralError("source profile size != nomega");
    BoundarySource src(grid);
    std::vector<double> profile(src.half_size_);
    for (std::size_t kp = 0; kp < grid.half(); ++kp)
        std::copy(per_omega.begin(), per_omega.end(), profile.begin() + static_cast<std::ptrdiff_t>(kp * grid.nomega()));
    src.add_term(std::move(profile), std::vector<double>(src.n_levels_, 1.0));
    return src;
}

void BoundarySource::add_term(std::vector<double> profile, std::vector<double> temporal) {
    if (profile.size() != half_size_ || temporal.size() != n_levels_) {
        throw StructuralError("boundary source term does not match the grid");
    }
    terms_.push_back({std::move(profile), std::move(temporal)});
}

BoundarySource BoundarySource::scaled(double factor) const {
    BoundarySource out = *this;
    for (auto& term : out.terms_)
        for (double& v : term.profile) v *= factor;
    return out;
}

BoundarySource BoundarySource::plus(const BoundarySource& other) const {
    if (other.half_size_ != half_size_ || other.n_levels_ != n_levels_) {
        throw StructuralError("boundary sources live on different grids");
    }
    BoundarySource out = *this;
    out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
    return out;
}

void BoundarySource::evaluate(std::size_t n, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& term : terms_) {
        const double w = term.temporal[n];
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < half_size_; ++j) out[j] += w * term.profile[j];
    }
}

double BoundarySource::sup_norm() const {
    std::vector<double> buf(half_size_);
    double s = 0.0;
    for (std::size_t n = 0; n < n_levels_; ++n) {
        evaluate(n, buf);
        for (double v : buf) s = std::max(s, std::abs(v));
    }
    return s;
}

bool BoundarySource::nonnegative() const {
    std::vector<double> buf(half_size_);
    for (std::size_t n = 0; n < n_levels_; ++n) {
        evaluate(n, buf);
        for (double v : buf)
            if (v < 0.0) return false;
    }
    return true;
}

ForwardSolution forward_solve(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                              const BoundarySource& phi, const ForwardOptions& opts) {
    if (grid.cfl() > 1.0 + 1e-12) throw ConfigError("forward_solve: CFL violation");
    if (eta.size() != grid.nomega()) throw StructuralError("forward_solve: eta size != nomega");
    const std::size_t nx = grid.nx();
    const std::size_t nmu = grid.nmu();
    const std::size_t nw = grid.nomega();
    const std::size_t half = grid.half();
    if (phi.half_size() != half * nw || phi.n_levels() != grid.n_levels()) {
        throw StructuralError("forward_solve: boundary source does not match the grid");
    }

    const double dt = grid.dt();
    const auto omega = grid.omega_nodes();
    const auto maxw = table.maxwellian();
    const double moment_w = grid.weight_mu() * grid.weight_omega();

    // Per-ordinate Courant numbers and the coefficient kept on the old value.
    std::vector<double> courant(nmu * nw);
    std::vector<double> keep(nmu * nw);
    for (std::size_t k = 0; k < nmu; ++k)
        for (std::size_t m = 0; m < nw; ++m) {
            const double c = std::abs(grid.mu(k)) * omega[m] * dt / grid.dx();
            courant[k * nw + m] = c;
            keep[k * nw + m] = 1.0 - c - omega[m] * dt;
        }

    KineticField cur(grid);
    if (opts.initial) {
        if (!opts.initial->matches(grid)) throw StructuralError("forward_solve: initial field shape mismatch");
        cur = *opts.initial;
    }
    KineticField next(grid);

    ForwardSolution sol;
    sol.surface_deltaT.assign(grid.n_levels(), 0.0);
    sol.interface_trace.assign(grid.n_levels() * half * nw, 0.0);
    sol.phi_sup_norm = phi.sup_norm();
    sol.min_value = cur.min_value();
    const double scale = std::max(sol.phi_sup_norm, cur.sup_norm());
    const double limit = opts.blowup_factor * scale;

    std::vector<double> phi_now(half * nw);
    std::vector<double> gain(nx);

    auto record = [&](std::size_t n) {
        // Surface face values: incoming half from phi, outgoing half from the first cell.
        double moment = 0.0;
        for (std::size_t k = 0; k < half; ++k)
            for (std::size_t m = 0; m < nw; ++m) moment += omega[m] * cur(0, k, m);
        for (std::size_t kp = 0; kp < half; ++kp)
            for (std::size_t m = 0; m < nw; ++m) moment += omega[m] * phi_now[kp * nw + m];
        sol.surface_deltaT[n] = moment * moment_w / table.z_norm();

        double* tr = sol.interface_trace.data() + n * half * nw;
        for (std::size_t kp = 0; kp < half; ++kp)
            for (std::size_t m = 0; m < nw; ++m) tr[kp * nw + m] = cur(nx - 1, half + kp, m);

        const double sup = cur.sup_norm();
        if (!(sup <= limit) && sup > 0.0) {
            std::ostringstream msg;
            msg << "forward_solve: blow-up at t=" << grid.t(n) << " (||g||=" << sup << ", data size " << scale
                << ")";
            throw SolverError(msg.str());
        }
        if (!cur.all_finite()) throw SolverError("forward_solve: non-finite field");
        sol.sup_norm = std::max(sol.sup_norm, sup);
        sol.min_value = std::min(sol.min_value, cur.min_value());
        if (opts.store_trajectory) sol.trajectory.push_back(cur);
        if (std::find(opts.snapshot_levels.begin(), opts.snapshot_levels.end(), n) != opts.snapshot_levels.end()) {
            sol.snapshots.emplace(n, cur);
        }
    };

    if (opts.store_trajectory) sol.trajectory.reserve(grid.n_levels());

    for (std::size_t n = 0;; ++n) {
        phi.evaluate(n, phi_now);
        record(n);
        if (n == grid.nt()) break;

        for (std::size_t i = 0; i < nx; ++i) gain[i] = omega_moment(grid, cur.slice(i));

        for (std::size_t i = 0; i < nx; ++i) {
            const double src = dt * gain[i];
            for (std::size_t k = 0; k < nmu; ++k) {
                const bool positive = k >= half;
                const double* up;
                std::vector<double>::size_type mirror_k = grid.mirror(k);
                const double* c = courant.data() + k * nw;
                const double* a = keep.data() + k * nw;
                const double* g = &cur(i, k, 0);
                double* out = &next(i, k, 0);
                if (positive) {
                    if (i == 0) {
                        up = phi_now.data() + (k - half) * nw;
                        for (std::size_t m = 0; m < nw; ++m) out[m] = a[m] * g[m] + c[m] * up[m] + src * maxw[m];
                        continue;
                    }
                    up = &cur(i - 1, k, 0);
                } else {
                    if (i == nx - 1) {
                        const double* refl = &cur(nx - 1, mirror_k, 0);
                        for (std::size_t m = 0; m < nw; ++m)
                            out[m] = a[m] * g[m] + c[m] * eta[m] * refl[m] + src * maxw[m];
                        continue;
                    }
                    up = &cur(i + 1, k, 0);
                }
                for (std::size_t m = 0; m < nw; ++m) out[m] = a[m] * g[m] + c[m] * up[m] + src * maxw[m];
            }
        }
        std::swap(cur, next);
    }
    return sol;
}

double surface_functional(const PhaseGrid& grid, std::span<const double> surface_deltaT,
                          std::span<const double> psi) {
    if (surface_deltaT.size() != grid.n_levels() || psi.size() != grid.n_levels()) {
        throw StructuralError("surface_functional: series length != number of time levels");
    }
    double s = 0.0;
    for (std::size_t n = 0; n < psi.size(); ++n) s += surface_deltaT[n] * psi[n];
    return s * grid.dt();
}

MaxPrincipleReport max_principle_check(const ForwardSolution& solution, const BoundarySource& phi, double bound,
                                       double negativity_tol) {
    MaxPrincipleReport r;
    r.min_value = solution.min_value;
    if (solution.phi_sup_norm == 0.0) {
        r.trivial = true;
        r.bounded = true;
        r.nonnegative = true;
        return r;
    }
    r.ratio = solution.sup_norm / solution.phi_sup_norm;
    r.bounded = r.ratio <= bound;
    r.nonnegative = !phi.nonnegative() || solution.min_value >= -negativity_tol * solution.phi_sup_norm;
    return r;
}

}  // namespace phonon
