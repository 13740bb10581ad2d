#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "phonon/adjoint.hpp"
#include "phonon/experiment.hpp"
#include "phonon/grid.hpp"
#include "phonon/physics.hpp"
#include "phonon/reflection.hpp"
#include "phonon/transport.hpp"

namespace phonon {

// Two-parameter family eta = (tanh(10(omega - a)) - tanh(2(omega - b))) / 4 + 1/2.
struct TanhParams {
    double a = 1.5;
    double b = 1.0;
    bool operator==(const TanhParams&) const = default;
};

double eta_family(double omega, const TanhParams& p);
ReflectionCoeff eta_from_params(const TanhParams& p, const PhaseGrid& grid);
// d eta / d a and d eta / d b at each omega node.
std::vector<double> eta_da(const TanhParams& p, const PhaseGrid& grid);
std::vector<double> eta_db(const TanhParams& p, const PhaseGrid& grid);

// Chain rule: (dM/da, dM/db) = sum_m (deta/da, deta/db)(omega_m) G(omega_m) domega.
std::pair<double, double> chain_rule_params(const TanhParams& p, const PhaseGrid& grid,
                                            std::span<const double> density);

// Plain l2 distance over omega nodes (no quadrature weights).
double reconstruction_error(std::span<const double> eta, std::span<const double> eta_ref);

// Everything a loss evaluation needs; references must outlive the problem.
struct InverseProblem {
    const PhaseGrid& grid;
    const MaxwellianTable& table;
    const ExperimentBank& bank;
    const Dataset& data;
};

// M_ij(eta) = sum_n dT_i(t_n, 0) psi_j(t_n) dt.
double measurement(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                   const BoundarySource& phi, const MeasurementFunctional& psi);

struct MeasurementWithGradient {
    double value = 0.0;
    std::vector<double> density;  // Frechet derivative density over omega
};

// One forward and one adjoint solve. With concurrent = true they run on two threads.
MeasurementWithGradient measurement_gradient(const PhaseGrid& grid, const MaxwellianTable& table,
                                             const ReflectionCoeff& eta, const BoundarySource& phi,
                                             const MeasurementFunctional& psi, bool concurrent = false);

// L_ij = M_ij(eta) - d_ij.
double residual(const InverseProblem& problem, const ReflectionCoeff& eta, Gamma gamma);
// (1/IJ) sum_ij L_ij^2, one forward solve per experiment i.
double loss(const InverseProblem& problem, const ReflectionCoeff& eta, std::size_t jobs = 1);
// All M_ij, row-major.
std::vector<double> all_measurements(const PhaseGrid& grid, const MaxwellianTable& table,
                                     const ReflectionCoeff& eta, const ExperimentBank& bank, std::size_t jobs = 1);

enum class InversionMode { parametrized, free };

struct StepSchedule {
    double alpha0 = 0.0;
    // alpha_n = alpha0 / (1 + n / decay_n0); decay_n0 <= 0 keeps alpha constant.
    double decay_n0 = 0.0;
    double at(std::size_t n) const;
};

// Uniform draw from [0, n) using only raw 64-bit output of the engine.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n);

struct ReconstructionState {
    InversionMode mode = InversionMode::free;
    ReflectionCoeff eta;
    TanhParams params;
    std::size_t n = 0;
    StepSchedule schedule;
    std::mt19937_64 rng;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> eta_ref;

    // Append-only histories. error_history[n] is the error of iterate n.
    std::vector<double> error_history;
    std::vector<double> loss_history;  // L_gamma^2 of the sample used at step n+1
    std::vector<Gamma> gamma_history;
    std::vector<TanhParams> param_history;  // parametrized mode only, iterate n
    bool last_rejected = false;
    double last_change = 0.0;
};

ReconstructionState make_free_state(const PhaseGrid& grid, ReflectionCoeff eta0, std::uint64_t seed,
                                    std::optional<std::vector<double>> eta_ref = std::nullopt);
ReconstructionState make_parametrized_state(const PhaseGrid& grid, TanhParams p0, std::uint64_t seed,
                                            std::optional<std::vector<double>> eta_ref = std::nullopt);

// Update direction 2 L grad (free) or 2 L (G_a, G_b) (parametrized) for an injected residual/gradient.
std::vector<double> update_direction(const ReconstructionState& state, const PhaseGrid& grid, double residual_value,
                                     std::span<const double> density);

// Apply eta_{n+1} = P[eta_n - 2 alpha L grad]; appends histories and returns the new state.
ReconstructionState apply_update(const ReconstructionState& state, const PhaseGrid& grid, Gamma gamma,
                                 double residual_value, std::span<const double> density);

// One step of the stochastic gradient iteration with gamma drawn uniformly from the state RNG.
// Works for both modes; a non-finite gradient leaves the iterate unchanged and sets last_rejected.
ReconstructionState sgd_step(const ReconstructionState& state, const InverseProblem& problem,
                             bool concurrent = false);
// Same as sgd_step but asserts the state is parametrized.
ReconstructionState sgd_step_parametrized(const ReconstructionState& state, const InverseProblem& problem,
                                          bool concurrent = false);

struct SgdSettings {
    // alpha <= 0 selects alpha from the first sampled gamma so the first step
    // changes the iterate by alpha_target (relative).
    double alpha = 0.0;
    double alpha_target = 0.01;
    double decay_n0 = 0.0;
    std::size_t max_iters = 3000;
    // Stop when ||theta_{n+1} - theta_n|| <= epsilon.
    double epsilon = 0.0;
    bool concurrent = false;
    // Iterations at which to keep a copy of eta.
    std::vector<std::size_t> snapshot_iters;
};

struct ReconstructionResult {
    ReconstructionState state;
    std::vector<std::pair<std::size_t, std::vector<double>>> snapshots;
    bool converged = false;  // stopped on the epsilon criterion
    std::size_t rejected_steps = 0;
};

ReconstructionResult reconstruct(const InverseProblem& problem, ReconstructionState initial,
                                 const SgdSettings& settings);

}  // namespace phonon
