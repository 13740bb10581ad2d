#include "phonon/inverse.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "phonon/errors.hpp"
#include "phonon/parallel.hpp"

namespace phonon {

double eta_family(double omega, const TanhParams& p) {
    return (std::tanh(10.0 * (omega - p.a)) - std::tanh(2.0 * (omega - p.b))) / 4.0 + 0.5;
}

ReflectionCoeff eta_from_params(const TanhParams& p, const PhaseGrid& grid) {
    std::vector<double> v(grid.nomega());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = eta_family(grid.omega(m), p);
    return ReflectionCoeff(std::move(v));
}

std::vector<double> eta_da(const TanhParams& p, const PhaseGrid& grid) {
    std::vector<double> v(grid.nomega());
    for (std::size_t m = 0; m < v.size(); ++m) {
        const double th = std::tanh(10.0 * (grid.omega(m) - p.a));
        v[m] = -10.0 * (1.0 - th * th) / 4.0;
    }
    return v;
}

std::vector<double> eta_db(const TanhParams& p, const PhaseGrid& grid) {
    std::vector<double> v(grid.nomega());
    for (std::size_t m = 0; m < v.size(); ++m) {
        const double th = std::tanh(2.0 * (grid.omega(m) - p.b));
        v[m] = 2.0 * (1.0 - th * th) / 4.0;
    }
    return v;
}

std::pair<double, double> chain_rule_params(const TanhParams& p, const PhaseGrid& grid,
                                            std::span<const double> density) {
    if (density.size() != grid.nomega()) throw StructuralError("chain_rule_params: gradient size != nomega");
    const auto da = eta_da(p, grid);
    const auto db = eta_db(p, grid);
    double ga = 0.0;
    double gb = 0.0;
    for (std::size_t m = 0; m < density.size(); ++m) {
        ga += da[m] * density[m];
        gb += db[m] * density[m];
    }
    return {ga * grid.weight_omega(), gb * grid.weight_omega()};
}

double reconstruction_error(std::span<const double> eta, std::span<const double> eta_ref) {
    if (eta.size() != eta_ref.size()) throw StructuralError("reconstruction_error: size mismatch");
    double s = 0.0;
    for (std::size_t m = 0; m < eta.size(); ++m) s += (eta[m] - eta_ref[m]) * (eta[m] - eta_ref[m]);
    return std::sqrt(s);
}

double measurement(const PhaseGrid& grid, const MaxwellianTable& table, const ReflectionCoeff& eta,
                   const BoundarySource& phi, const MeasurementFunctional& psi) {
    const auto fwd = forward_solve(grid, table, eta, phi);
    return surface_functional(grid, fwd.surface_deltaT, psi.values());
}

MeasurementWithGradient measurement_gradient(const PhaseGrid& grid, const MaxwellianTable& table,
                                             const ReflectionCoeff& eta, const BoundarySource& phi,
                                             const MeasurementFunctional& psi, bool concurrent) {
    ForwardSolution fwd;
    AdjointSolution adj;
    if (concurrent) {
        auto pending = std::async(std::launch::async, [&] { return adjoint_solve(grid, table, eta, psi); });
        fwd = forward_solve(grid, table, eta, phi);
        adj = pending.get();
    } else {
        fwd = forward_solve(grid, table, eta, phi);
        adj = adjoint_solve(grid, table, eta, psi);
    }
    MeasurementWithGradient out;
    out.value = surface_functional(grid, fwd.surface_deltaT, psi.values());
    out.density = frechet_gradient(grid, table, fwd, adj);
    return out;
}

namespace {

void check_gamma(const InverseProblem& problem, Gamma gamma) {
    if (gamma.i >= problem.bank.I() || gamma.j >= problem.bank.J() || gamma.i >= problem.data.I ||
        gamma.j >= problem.data.J || problem.data.values.size() != problem.data.I * problem.data.J) {
        std::ostringstream msg;
        msg << "no datum for gamma = (" << gamma.i << ", " << gamma.j << ")";
        throw StructuralError(msg.str());
    }
}

std::vector<double> theta_of(const ReconstructionState& s) {
    if (s.mode == InversionMode::parametrized) return {s.params.a, s.params.b};
    return {s.eta.values().begin(), s.eta.values().end()};
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double residual(const InverseProblem& problem, const ReflectionCoeff& eta, Gamma gamma) {
    check_gamma(problem, gamma);
    return measurement(problem.grid, problem.table, eta, problem.bank.phis[gamma.i], problem.bank.psis[gamma.j]) -
           problem.data.at(gamma.i, gamma.j);
}

std::vector<double> all_measurements(const PhaseGrid& grid, const MaxwellianTable& table,
                                     const ReflectionCoeff& eta, const ExperimentBank& bank, std::size_t jobs) {
    const std::size_t I = bank.I();
    const std::size_t J = bank.J();
    std::vector<double> out(I * J);
    parallel_for(I, jobs, [&](std::size_t i) {
        const auto fwd = forward_solve(grid, table, eta, bank.phis[i]);
        for (std::size_t j = 0; j < J; ++j)
            out[i * J + j] = surface_functional(grid, fwd.surface_deltaT, bank.psis[j].values());
    });
    return out;
}

double loss(const InverseProblem& problem, const ReflectionCoeff& eta, std::size_t jobs) {
    const std::size_t count = problem.data.I * problem.data.J;
    if (count == 0) throw StructuralError("loss: empty dataset");
    if (problem.bank.I() != problem.data.I || problem.bank.J() != problem.data.J) {
        throw StructuralError("loss: experiment bank and dataset sizes differ");
    }
    const auto model = all_measurements(problem.grid, problem.table, eta, problem.bank, jobs);
    double s = 0.0;
    for (std::size_t q = 0; q < count; ++q) {
        const double r = model[q] - problem.data.values[q];
        s += r * r;
    }
    return s / static_cast<double>(count);
}

double StepSchedule::at(std::size_t n) const {
    if (decay_n0 <= 0.0) return alpha0;
    return alpha0 / (1.0 + static_cast<double>(n) / decay_n0);
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
    if (n == 0) throw StructuralError("draw_index: empty range");
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    for (;;) {
        const std::uint64_t r = rng();
        if (r < limit) return static_cast<std::size_t>(r % range);
    }
}

namespace {

ReconstructionState base_state(InversionMode mode, std::uint64_t seed, std::optional<std::vector<double>> eta_ref) {
    ReconstructionState s;
    s.mode = mode;
    s.seed = seed;
    s.rng.seed(seed);
    s.eta_ref = std::move(eta_ref);
    return s;
}

void record_error(ReconstructionState& s) {
    if (s.eta_ref) s.error_history.push_back(reconstruction_error(s.eta.values(), *s.eta_ref));
}

}  // namespace

ReconstructionState make_free_state(const PhaseGrid& grid, ReflectionCoeff eta0, std::uint64_t seed,
                                    std::optional<std::vector<double>> eta_ref) {
    if (eta0.size() != grid.nomega()) throw StructuralError("initial eta size != nomega");
    if (eta_ref && eta_ref->size() != grid.nomega()) throw StructuralError("reference eta size != nomega");
    auto s = base_state(InversionMode::free, seed, std::move(eta_ref));
    s.eta = std::move(eta0);
    record_error(s);
    return s;
}

ReconstructionState make_parametrized_state(const PhaseGrid& grid, TanhParams p0, std::uint64_t seed,
                                            std::optional<std::vector<double>> eta_ref) {
    if (eta_ref && eta_ref->size() != grid.nomega()) throw StructuralError("reference eta size != nomega");
    auto s = base_state(InversionMode::parametrized, seed, std::move(eta_ref));
    s.params = p0;
    s.eta = eta_from_params(p0, grid);
    s.param_history.push_back(p0);
    record_error(s);
    return s;
}

std::vector<double> update_direction(const ReconstructionState& state, const PhaseGrid& grid, double residual_value,
                                     std::span<const double> density) {
    if (density.size() != grid.nomega()) throw StructuralError("update_direction: gradient size != nomega");
    if (state.mode == InversionMode::parametrized) {
        const auto [ga, gb] = chain_rule_params(state.params, grid, density);
        return {2.0 * residual_value * ga, 2.0 * residual_value * gb};
    }
    std::vector<double> d(density.size());
    for (std::size_t m = 0; m < d.size(); ++m) d[m] = 2.0 * residual_value * density[m];
    return d;
}

ReconstructionState apply_update(const ReconstructionState& state, const PhaseGrid& grid, Gamma gamma,
                                 double residual_value, std::span<const double> density) {
    ReconstructionState next = state;
    next.gamma_history.push_back(gamma);
    next.loss_history.push_back(residual_value * residual_value);

    const auto dir = update_direction(state, grid, residual_value, density);
    bool finite = std::isfinite(residual_value);
    for (double v : dir) finite = finite && std::isfinite(v);

    const double alpha = state.schedule.at(state.n);
    next.last_rejected = !finite;
    next.last_change = 0.0;
    if (finite) {
        if (state.mode == InversionMode::parametrized) {
            next.params.a = state.params.a - alpha * dir[0];
            next.params.b = state.params.b - alpha * dir[1];
            next.eta = eta_from_params(next.params, grid);
            next.last_change = std::hypot(next.params.a - state.params.a, next.params.b - state.params.b);
        } else {
            std::vector<double> v(state.eta.values().begin(), state.eta.values().end());
            for (std::size_t m = 0; m < v.size(); ++m) v[m] -= alpha * dir[m];
            next.eta = ReflectionCoeff::projected(std::move(v));
            next.last_change = reconstruction_error(next.eta.values(), state.eta.values());
        }
    }
    next.n = state.n + 1;
    if (next.mode == InversionMode::parametrized) next.param_history.push_back(next.params);
    record_error(next);
    return next;
}

namespace {

struct Sample {
    Gamma gamma;
    double residual = 0.0;
    std::vector<double> density;
};

Sample draw_and_evaluate(ReconstructionState& state, const InverseProblem& problem, bool concurrent) {
    const std::size_t I = problem.bank.I();
    const std::size_t J = problem.bank.J();
    const std::size_t q = draw_index(state.rng, I * J);
    Sample s;
    s.gamma = {q / J, q % J};
    check_gamma(problem, s.gamma);
    auto mg = measurement_gradient(problem.grid, problem.table, state.eta, problem.bank.phis[s.gamma.i],
                                   problem.bank.psis[s.gamma.j], concurrent);
    s.residual = mg.value - problem.data.at(s.gamma.i, s.gamma.j);
    s.density = std::move(mg.density);
    return s;
}

}  // namespace

ReconstructionState sgd_step(const ReconstructionState& state, const InverseProblem& problem, bool concurrent) {
    ReconstructionState work = state;
    auto sample = draw_and_evaluate(work, problem, concurrent);
    return apply_update(work, problem.grid, sample.gamma, sample.residual, sample.density);
}

ReconstructionState sgd_step_parametrized(const ReconstructionState& state, const InverseProblem& problem,
                                          bool concurrent) {
    if (state.mode != InversionMode::parametrized) {
        throw StructuralError("sgd_step_parametrized: state is not parametrized");
    }
    return sgd_step(state, problem, concurrent);
}

ReconstructionResult reconstruct(const InverseProblem& problem, ReconstructionState initial,
                                 const SgdSettings& settings) {
    ReconstructionResult result;
    ReconstructionState state = std::move(initial);
    if (settings.alpha > 0.0) state.schedule = {settings.alpha, settings.decay_n0};

    auto keep_snapshot = [&](const ReconstructionState& s) {
        for (std::size_t it : settings.snapshot_iters)
            if (it == s.n) {
                result.snapshots.emplace_back(s.n, std::vector<double>(s.eta.values().begin(), s.eta.values().end()));
            }
    };
    keep_snapshot(state);

    while (state.n < settings.max_iters) {
        ReconstructionState work = state;
        auto sample = draw_and_evaluate(work, problem, settings.concurrent);
        if (work.schedule.alpha0 <= 0.0) {
            // Pick alpha so this first step moves theta by alpha_target relative to its size.
            const auto dir = update_direction(work, problem.grid, sample.residual, sample.density);
            const double dnorm = norm2(dir);
            const double tnorm = norm2(theta_of(work));
            const double ref = tnorm > 0.0 ? tnorm : 1.0;
            const double alpha = dnorm > 0.0 && std::isfinite(dnorm) ? settings.alpha_target * ref / dnorm : 1.0;
            work.schedule = {alpha, settings.decay_n0};
        }
        state = apply_update(work, problem.grid, sample.gamma, sample.residual, sample.density);
        if (state.last_rejected) ++result.rejected_steps;
        keep_snapshot(state);
        if (!state.last_rejected && state.last_change <= settings.epsilon) {
            result.converged = true;
            break;
        }
    }
    result.state = std::move(state);
    return result;
}

}  // namespace phonon
