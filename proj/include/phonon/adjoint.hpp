#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "phonon/field.hpp"
#include "phonon/grid.hpp"
#include "phonon/physics.hpp"
#include "phonon/reflection.hpp"
#include "phonon/transport.hpp"

namespace phonon {

// Time test function psi(t_n) applied to the surface temperature.
class MeasurementFunctional {
public:
    MeasurementFunctional() = default;
    // Throws StructuralError on a length mismatch, DomainError on non-finite values.
    MeasurementFunctional(const PhaseGrid& grid, std::vector<double> values);

    // delta(t - t_j) realised as 1/dt at the time level nearest to t_j.
    static MeasurementFunctional kronecker(const PhaseGrid& grid, double t_j);
    static MeasurementFunctional kronecker_level(const PhaseGrid& grid, std::size_t level);

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t n) const { return values_[n]; }
    std::size_t size() const { return values_.size(); }
    MeasurementFunctional scaled(double factor) const;
    bool is_zero() const;

private:
    std::vector<double> values_;
};

enum class AdjointBoundary {
    // h(x=0, mu<0) = psi(t) g*(omega) / mu : gradient machinery.
    surface,
    // Interface demonstration: source M_demo(omega) psi(t) / (|mu| omega)
    // entering through the interface on the ordinates incoming in reversed time.
    interface_demo,
};

struct AdjointOptions {
    AdjointBoundary boundary = AdjointBoundary::surface;
    // Width of a Gaussian in mu used to mollify 1/mu at the surface; 0 disables it.
    double mollify_width = 0.0;
    bool store_trajectory = false;
    std::vector<std::size_t> snapshot_levels;
    double blowup_factor = 1e6;
};

struct AdjointSolution {
    // h(t_n, x_max, mu < 0, omega), laid out [(n * nmu/2 + k) * nomega + m] with k < nmu/2.
    std::vector<double> interface_trace;
    std::vector<KineticField> trajectory;  // indexed by time level when stored
    std::map<std::size_t, KineticField> snapshots;
    double sup_norm = 0.0;
};

// Profile (10 omega)^3 e^{10 omega} / (e^{10 omega} - 1)^2 used by the interface demonstration.
double demo_interface_profile(double omega);

// The 1/mu surface factor for the mu < 0 ordinates, optionally mollified in mu.
std::vector<double> surface_mu_factor(const PhaseGrid& grid, double mollify_width);

/**
 * Backward march of dh/dt + mu omega dh/dx = -L h from h(t_max) = 0.
 *
 * In reversed time s = t_max - t this is the forward scheme with the
 * transport direction flipped: mu < 0 ordinates enter at x = 0 and mu > 0
 * ordinates enter at the interface with h = eta h(-mu). Boundary data are
 * taken at the old (later) time level, matching the explicit forward march.
 */
AdjointSolution adjoint_solve(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                              const MeasurementFunctional& psi, const AdjointOptions& opts = {});

/**
 * Frechet derivative density of a surface measurement with respect to eta:
 *   G(omega) = 1/Z sum_n sum_{mu<0} mu omega h(t_n, x_max, mu) g(t_n, x_max, -mu) / g* dmu dt.
 * The derivative with respect to the nodal value eta_m is G(omega_m) * domega.
 */
std::vector<double> frechet_gradient(const PhaseGrid& grid, const MaxwellianTable& table,
                                     const ForwardSolution& fwd, const AdjointSolution& adj);

// G(omega_m) * domega.
std::vector<double> nodal_gradient(const PhaseGrid& grid, std::span<const double> density);

}  // namespace phonon
