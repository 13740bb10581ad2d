#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "phonon/field.hpp"
#include "phonon/grid.hpp"
#include "phonon/physics.hpp"
#include "phonon/reflection.hpp"

namespace phonon {

/**
 * Inflow data phi(mu, omega, t) at x = 0 for mu > 0, stored as a sum of
 * separable terms profile(mu, omega) * temporal(t). Profiles are laid out
 * [kp * nomega + m] with kp = k - grid.half().
 */
class BoundarySource {
public:
    struct Term {
        std::vector<double> profile;
        std::vector<double> temporal;
    };

    BoundarySource() = default;
    explicit BoundarySource(const PhaseGrid& grid);

    // phi = delta(omega - omega_m) realised as 1 at one node, constant in time.
    static BoundarySource kronecker(const PhaseGrid& grid, std::size_t omega_index);
    // phi = f(omega) broadcast over mu > 0, constant in time.
    static BoundarySource from_profile(const PhaseGrid& grid, std::span<const double> per_omega);

    void add_term(std::vector<double> profile, std::vector<double> temporal);

    BoundarySource scaled(double factor) const;
    BoundarySource plus(const BoundarySource& other) const;

    // Writes phi at time level n into out ([kp * nomega + m], size nmu/2 * nomega).
    void evaluate(std::size_t n, std::span<double> out) const;
    double sup_norm() const;
    bool nonnegative() const;
    bool is_zero() const { return sup_norm() == 0.0; }

    std::size_t half_size() const { return half_size_; }
    std::size_t n_levels() const { return n_levels_; }
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::size_t half_size_ = 0;
    std::size_t n_levels_ = 0;
    std::vector<Term> terms_;
};

struct ForwardOptions {
    bool store_trajectory = false;
    // Time levels at which to keep a copy of the field.
    std::vector<std::size_t> snapshot_levels;
    // Defaults to the zero field.
    std::optional<KineticField> initial;
    // Abort when ||g||_inf exceeds this multiple of the data size.
    double blowup_factor = 1e6;
};

struct ForwardSolution {
    // Temperature deviation at the surface x = 0 at each time level.
    std::vector<double> surface_deltaT;
    // Outgoing half at the interface: g(t_n, x_max, mu > 0, omega),
    // laid out [(n * nmu/2 + kp) * nomega + m].
    std::vector<double> interface_trace;
    std::vector<KineticField> trajectory;
    std::map<std::size_t, KineticField> snapshots;
    // Running extrema over all levels and cells.
    double sup_norm = 0.0;
    double min_value = 0.0;
    double phi_sup_norm = 0.0;

    double trace(std::size_t n, std::size_t kp, std::size_t m, std::size_t half, std::size_t nomega) const {
        return interface_trace[(n * half + kp) * nomega + m];
    }
};

/**
 * Explicit first-order upwind / forward Euler march of
 *   dg/dt + mu omega dg/dx = -omega g + M <omega g>
 * with g = phi at x = 0 (mu > 0) and g = eta(omega) g(x_max, -mu) at the
 * interface (mu < 0). The reflection ghost uses the same-level outgoing value.
 */
ForwardSolution forward_solve(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                              const BoundarySource& phi, const ForwardOptions& opts = {});

// Surface temperature tested against a time weight: sum_n dT(t_n) psi(t_n) dt.
double surface_functional(const PhaseGrid& grid, std::span<const double> surface_deltaT,
                          std::span<const double> psi);

struct MaxPrincipleReport {
    // ||g||_inf / ||phi||_inf; 0 for the trivial phi == 0 case.
    double ratio = 0.0;
    double min_value = 0.0;
    bool trivial = false;
    bool bounded = false;
    bool nonnegative = false;
    bool pass() const { return trivial || (bounded && nonnegative); }
};

MaxPrincipleReport max_principle_check(const ForwardSolution& solution, const BoundarySource& phi,
                                       double bound, double negativity_tol = 1e-12);

}  // namespace phonon
