// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "phonon/data.hpp"
#include "phonon/inverse.hpp"
#include "phonon/oracle.hpp"

using namespace phonon;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::size_t jobs = 4;
int failures = 0;

void report(int id, const char* name, bool pass, double seconds, double budget, const std::string& detail) {
    const bool in_time = seconds < budget;
    const bool ok = pass && in_time;
    if (!ok) ++failures;
    std::printf("%s  %2d  %-34s %s; %.1f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(),
                seconds, budget, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

PhaseGrid coarse(std::size_t nt = 250) { return PhaseGrid::make(GridCounts{0.5, 5.0, 0.1, 2.0, 10, 20, 20, nt}); }

std::vector<double> as_vec(const ReflectionCoeff& e) { return {e.values().begin(), e.values().end()}; }

void criterion_conservation() {
    const auto t0 = Clock::now();
    const auto g = coarse();
    const MaxwellianTable t(g);
    const double v = conservation_probe(g, t, 100, 2024);
    report(1, "discrete conservation", v <= 1e-12, since(t0), 1.0, fmt("max |<Lg>|/|g|inf = %.2e (<= 1e-12)", v));
}

void criterion_equilibrium() {
    const auto t0 = Clock::now();
    const auto g = coarse();
    const MaxwellianTable t(g);
    const double v = equilibrium_deviation(g, t);
    report(2, "equilibrium fixed point", v <= 1e-12, since(t0), 5.0, fmt("max_t |g - g*|inf = %.2e (<= 1e-12)", v));
}

void criterion_selfadjoint() {
    const auto t0 = Clock::now();
    const auto g = coarse();
    const MaxwellianTable t(g);
    const double v = selfadjoint_probe(g, t, 100, 2024);
    report(3, "self-adjointness", v <= 1e-12, since(t0), 1.0, fmt("max discrepancy = %.2e (<= 1e-12)", v));
}

double worst_gradient_error(const PhaseGrid& g) {
    const MaxwellianTable t(g);
    const auto eta = eta_from_params({1.5, 1.0}, g);
    const auto psi = MeasurementFunctional::kronecker_level(g, g.nt());
    double worst = 0.0;
    for (double w : {0.5, 1.0, 1.5}) {
        const auto phi = BoundarySource::kronecker(g, g.omega_index(w));
        worst = std::max(worst, gradient_check(g, t, eta, phi, psi, 1e-3, jobs).rel_l2_error);
    }
    return worst;
}

void criterion_gradient() {
    const auto t0 = Clock::now();
    const auto g = coarse();
    const double e_coarse = worst_gradient_error(g);
    const double e_fine = worst_gradient_error(PhaseGrid::make(refined_counts(g)));
    const double ratio = e_fine / e_coarse;
    report(4, "gradient vs finite differences", e_coarse <= 0.02 && ratio <= 0.6, since(t0), 600.0,
           fmt("rel l2 = %.2e (<= 0.02), fine/coarse = %.3f (<= 0.6)", e_coarse, ratio));
}

void criterion_convexity() {
    const auto t0 = Clock::now();
    const auto g = coarse();
    const MaxwellianTable t(g);
    std::mt19937_64 rng(77);
    const std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double gap = std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    for (int p = 0; p < 20; ++p) {
        std::vector<double> e1(g.nomega()), e2(g.nomega());
        for (std::size_t m = 0; m < e1.size(); ++m) {
            const double u = 0.5 * (uniform_pm1(rng) + 1.0);
            const double v = 0.5 * (uniform_pm1(rng) + 1.0);
            e1[m] = std::max(u, v);
            e2[m] = std::min(u, v);
        }
        const auto phi = BoundarySource::kronecker(g, draw_index(rng, g.nomega()));
        const auto r = convexity_sweep(g, t, phi, ReflectionCoeff(e1), ReflectionCoeff(e2), alphas);
        gap = std::min(gap, r.monotone_gap);
        margin = std::min(margin, r.worst_margin);
    }
    report(5, "monotonicity and convexity", gap >= -1e-12 && margin >= -1e-10, since(t0), 300.0,
           fmt("min g1-g2 = %.2e (>= -1e-12), convexity margin = %.2e (>= -1e-10)", gap, margin));
}

struct Example {
    PhaseGrid grid;
    MaxwellianTable table;
    ExperimentBank bank;
    Dataset data;
    std::vector<double> truth;
    InverseProblem problem() const { return {grid, table, bank, data}; }
};

Example make_example(const cli::RunConfig& c) {
    const auto g = c.grid.build();
    const MaxwellianTable t(g);
    const auto& x = c.experiment;
    auto bank = make_default_bank(g, x.I, x.J, {x.window_lo, x.window_hi}, x.seed);
    const auto truth = x.truth.build(g);
    auto data = generate_dataset(g, t, bank, truth, {x.noise, x.noise_model, x.seed}, jobs);
    return {g, t, std::move(bank), std::move(data), as_vec(truth)};
}

SgdSettings settings_of(const cli::RunConfig& c) {
    SgdSettings s;
    s.alpha = c.inversion.alpha;
    s.alpha_target = c.inversion.alpha_target;
    s.max_iters = c.inversion.max_iters;
    s.epsilon = c.inversion.epsilon;
    return s;
}

void criterion_example1() {
    const auto t0 = Clock::now();
    const auto c = cli::preset("example1");
    const auto ex = make_example(c);
    bool ok = true;
    std::string detail;
    for (const auto& init : c.inversion.initial) {
        const auto r = reconstruct(ex.problem(), make_parametrized_state(ex.grid, init.params, c.inversion.seed, ex.truth),
                                   settings_of(c));
        const auto& s = r.state;
        const double ratio = s.error_history.back() / s.error_history.front();
        const bool pass = std::abs(s.params.a - 1.5) <= 0.05 && std::abs(s.params.b - 1.0) <= 0.05 && ratio <= 0.1;
        ok = ok && pass;
        detail += fmt("(%.1f,%.1f)->(%.3f,%.3f) err x%.1e; ", init.params.a, init.params.b, s.params.a, s.params.b, ratio);
    }
    report(6, "Example I reconstruction", ok, since(t0), 1800.0, detail + "tol |da|,|db| <= 0.05, err <= 0.1x");
}

void criterion_example2() {
    const auto t0 = Clock::now();
    const auto c = cli::preset("example2");
    const auto ex = make_example(c);
    const auto r = reconstruct(ex.problem(), make_free_state(ex.grid, ReflectionCoeff::constant(ex.grid, 0.5), c.inversion.seed, ex.truth),
                               settings_of(c));
    const auto& h = r.state.error_history;
    const std::size_t n = h.size() - 1;
    const double flat = std::abs(h[n] - h[n - 500]) / h[n - 500];
    const double ratio = h[n] / h[0];
    report(7, "Example II reconstruction", n == 3000 && flat <= 0.05 && ratio <= 0.2, since(t0), 2700.0,
           fmt("err %.4f -> %.4f (x%.3f <= 0.2), change over last 500 = %.1f%% (<= 5%%)", h[0], h[n], ratio, 100 * flat));
}

void criterion_example3() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        auto c = cli::preset("example3");
        c.experiment.seed = seed;
        c.inversion.seed = seed;
        const auto ex = make_example(c);
        const auto r = reconstruct(ex.problem(),
                                   make_free_state(ex.grid, ReflectionCoeff::constant(ex.grid, 0.5), seed, ex.truth),
                                   settings_of(c));
        const auto& h = r.state.error_history;
        const std::size_t n = h.size() - 1;
        const double ratio = h[n] / h[0];
        const auto [lo, hi] = std::minmax_element(h.end() - 501, h.end());
        ok = ok && ratio <= 0.5;
        detail += fmt("seed %d: x%.3f (last 500 in [%.3f, %.3f]); ", static_cast<int>(seed), ratio, *lo, *hi);
    }
    report(8, "Example III noisy reconstruction", ok, since(t0), 2700.0, detail + "err <= 0.5x");
}

void criterion_landscape() {
    const auto t0 = Clock::now();
    const auto c = cli::preset("example1");
    const auto ex = make_example(c);
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    int best_ia = -1, best_ib = -1;
    for (int ia = 0; ia <= 10; ++ia)
        for (int ib = 0; ib <= 10; ++ib) {
            const TanhParams p{1.0 + 0.1 * ia, 0.5 + 0.1 * ib};
            const double l = loss(ex.problem(), eta_from_params(p, ex.grid), jobs);
            if (l < best) {
                second = best;
                best = l;
                best_ia = ia;
                best_ib = ib;
            } else {
                second = std::min(second, l);
            }
        }
    const bool ok = best_ia == 5 && best_ib == 5 && best < second;
    report(9, "loss landscape minimizer", ok, since(t0), 1200.0,
           fmt("argmin = (%.1f, %.1f), loss %.2e vs next %.2e (want (1.5, 1.0))", 1.0 + 0.1 * best_ia,
               0.5 + 0.1 * best_ib, best, second));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_determinism() {
    const auto t0 = Clock::now();
    bool ok = true;
    int compared = 0;
    for (const char* name : {"example1", "example3"}) {
        auto c = cli::preset(name);
        c.inversion.max_iters = 150;
        c.inversion.snapshot_iters = {50, 150};
        const auto base = fs::temp_directory_path() / (std::string("phonon_accept_") + name);
        fs::remove_all(base);
        std::vector<fs::path> dirs{base / "a", base / "b"};
        for (const auto& d : dirs) {
            c.output.dir = d.string();
            cli::RunContext ctx;
            ctx.jobs = jobs;
            ok = ok && cli::cmd_reconstruct(c, ctx) == cli::exit_ok;
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            if (entry.path().extension() != ".csv") continue;
            ok = ok && slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
            ++compared;
        }
        fs::remove_all(base);
    }
    report(10, "determinism", ok && compared > 0, since(t0), 600.0, fmt("%d CSV files byte-identical across reruns", compared));
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> only;
    for (int q = 1; q < argc; ++q) {
        const std::string a = argv[q];
        if (a.rfind("--jobs=", 0) == 0) {
            jobs = std::stoul(a.substr(7));
        } else {
            only.push_back(a);
        }
    }
    const std::vector<std::pair<std::string, std::function<void()>>> all{
        {"1", criterion_conservation}, {"2", criterion_equilibrium}, {"3", criterion_selfadjoint},
        {"4", criterion_gradient},     {"5", criterion_convexity},   {"6", criterion_example1},
        {"7", criterion_example2},     {"8", criterion_example3},    {"9", criterion_landscape},
        {"10", criterion_determinism},
    };
    for (const auto& [id, run] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        try {
            run();
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL  %2s  threw: %s\n", id.c_str(), e.what());
        }
    }
    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
