#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phonon/adjoint.hpp"
#include "phonon/experiment.hpp"
#include "phonon/inverse.hpp"
#include "phonon/transport.hpp"

namespace phonon {

struct GradientCheckReport {
    std::vector<double> adjoint;  // nodal: G(omega_m) * domega
    std::vector<double> fd;
    double rel_l2_error = 0.0;
    double h = 0.0;
    std::string grid;
};

using ScalarOfEta = std::function<double(const ReflectionCoeff&)>;

/**
 * Central differences [f(eta + h e_m) - f(eta - h e_m)] / (2h) per omega node.
 * Near the bounds of [0, 1] the step shrinks to fit; at a bound it becomes
 * one-sided. Costs 2 nomega evaluations of f, spread over `jobs` threads.
 */
std::vector<double> fd_gradient(const ScalarOfEta& f, const ReflectionCoeff& eta, double h = 1e-3,
                                std::size_t jobs = 1);

// Finite-difference gradient of M_gamma = measurement(eta, phi_i, psi_j).
std::vector<double> fd_gradient(const InverseProblem& problem, const ReflectionCoeff& eta, Gamma gamma,
                                double h = 1e-3, std::size_t jobs = 1);

// Relative l2 distance ||a - b|| / ||b||; 0 when both vanish.
double relative_l2(const std::vector<double>& a, const std::vector<double>& b);

// Adjoint gradient versus finite differences for one (phi, psi) pair.
GradientCheckReport gradient_check(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                                   const BoundarySource& phi, const MeasurementFunctional& psi, double h = 1e-3,
                                   std::size_t jobs = 1);

struct ConvexityReport {
    // min over alpha, t of alpha dT1 + (1 - alpha) dT2 - dT_blend at x = 0.
    std::vector<double> margin_per_alpha;
    double worst_margin = 0.0;
    // min over t, x, mu, omega of g1 - g2.
    double monotone_gap = 0.0;
};

// Requires eta1 >= eta2 pointwise (DomainError otherwise).
ConvexityReport convexity_sweep(const PhaseGrid& grid, const MaxwellianTable& table, const BoundarySource& phi,
                                const ReflectionCoeff& eta1, const ReflectionCoeff& eta2,
                                const std::vector<double>& alphas);

// Max over random slice pairs (g, h) of |<L g, h/g*> - <L h, g/g*>| / (||g|| ||h||).
double selfadjoint_probe(const PhaseGrid& grid, const MaxwellianTable& table, std::size_t trials,
                         std::uint64_t seed);

// Max over random fields g of |<L g>| / ||g||_inf, taken per x slice.
double conservation_probe(const PhaseGrid& grid, const MaxwellianTable& table, std::size_t trials,
                          std::uint64_t seed);

// Empirical max of ||grad M(eta1) - grad M(eta2)|| / ||eta1 - eta2|| over random pairs in [0,1]^nomega.
double lipschitz_probe(const PhaseGrid& grid, const MaxwellianTable& table, const BoundarySource& phi,
                       const MeasurementFunctional& psi, std::size_t pairs, std::uint64_t seed);

// Max over all levels of ||g(t) - g*||_inf for eta = 1, phi = g*, g(0) = g*.
double equilibrium_deviation(const PhaseGrid& grid, const MaxwellianTable& table);

// Counts for one simultaneous refinement: dx, dt, dmu, domega halved with
// x_max, t_max and omega_max fixed (omega_min moves down by domega / 2).
GridCounts refined_counts(const PhaseGrid& grid);

}  // namespace phonon
