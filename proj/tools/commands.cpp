#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "csv.hpp"
#include "phonon/adjoint.hpp"
#include "phonon/data.hpp"
#include "phonon/errors.hpp"
#include "phonon/inverse.hpp"
#include "phonon/oracle.hpp"
#include "phonon/transport.hpp"

namespace phonon::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

fs::path prepare_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    return dir;
}

void write_metadata(const fs::path& dir, const std::string& command, const RunConfig& cfg, const RunContext& ctx,
                    const PhaseGrid& grid, json extra, Clock::time_point t0) {
    json meta = {
        {"version", version},
        {"command", command},
        {"preset", ctx.preset},
        {"jobs", ctx.jobs},
        {"grid", grid.describe()},
        {"seeds", {{"data", cfg.experiment.seed}, {"sgd", cfg.inversion.seed}}},
        {"config", config_to_json(cfg)},
        {"timestamp", utc_timestamp()},
        {"wall_time_s", seconds_since(t0)},
    };
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    std::ofstream out(dir / "metadata.json", std::ios::binary);
    out << meta.dump(2) << '\n';
}

// Compact label for file names and column headers.
std::string time_label(double t) {
    std::ostringstream os;
    os << std::setprecision(10) << t;
    return os.str();
}

BoundarySource build_phi(const PhaseGrid& grid, const MaxwellianTable& table, const PhiSpec& spec) {
    switch (spec.kind) {
        case PhiSpec::Kind::kronecker:
            return BoundarySource::kronecker(grid, grid.omega_index(spec.omega));
        case PhiSpec::Kind::zero:
            return BoundarySource(grid);
        case PhiSpec::Kind::gstar:
            return BoundarySource::from_profile(grid, table.gstar());
    }
    return BoundarySource(grid);
}

std::vector<std::size_t> levels_for(const PhaseGrid& grid, const std::vector<double>& times) {
    std::vector<std::size_t> out;
    for (double t : times) out.push_back(grid.nearest_level(t));
    return out;
}

// Two views of one time level: omega-integrated (x by mu) and mu-integrated (x by omega).
void write_snapshot(const fs::path& dir, const std::string& prefix, const PhaseGrid& grid, std::size_t level,
                    const KineticField& g) {
    const std::string t = time_label(grid.t(level));
    {
        std::vector<std::string> header{"x"};
        for (double mu : grid.mu_nodes()) header.push_back(time_label(mu));
        CsvWriter csv(dir / (prefix + "_x_mu_t" + t + ".csv"), header,
                      {"t=" + t, "integral over omega; rows x, columns mu"});
        const auto vals = integrate_omega(grid, g);
        std::vector<double> row(grid.nmu() + 1);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            row[0] = grid.x(i);
            for (std::size_t k = 0; k < grid.nmu(); ++k) row[k + 1] = vals[i * grid.nmu() + k];
            csv.row(row);
        }
    }
    {
        std::vector<std::string> header{"x"};
        for (double w : grid.omega_nodes()) header.push_back(time_label(w));
        CsvWriter csv(dir / (prefix + "_x_omega_t" + t + ".csv"), header,
                      {"t=" + t, "integral over mu; rows x, columns omega"});
        const auto vals = integrate_mu(grid, g);
        std::vector<double> row(grid.nomega() + 1);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            row[0] = grid.x(i);
            for (std::size_t m = 0; m < grid.nomega(); ++m) row[m + 1] = vals[i * grid.nomega() + m];
            csv.row(row);
        }
    }
}

void say(const RunContext& ctx, const std::string& line) {
    if (ctx.log) *ctx.log << line << '\n';
}

struct LoadedProblem {
    ExperimentBank bank;
    Dataset data;
    std::optional<std::vector<double>> truth;
    bool generated = false;
};

LoadedProblem load_or_generate(const RunConfig& cfg, const PhaseGrid& grid, const MaxwellianTable& table,
                               std::size_t jobs) {
    const auto& x = cfg.experiment;
    LoadedProblem lp;
    if (!x.dataset.empty()) {
        lp.data = load_dataset(x.dataset);
        if (!lp.data.phi_omega_index.empty() && !lp.data.psi_level.empty()) {
            lp.bank = make_bank(grid, lp.data.phi_omega_index, lp.data.psi_level);
        } else {
            lp.bank = make_default_bank(grid, lp.data.I, lp.data.J, {x.window_lo, x.window_hi}, x.seed);
        }
        if (lp.bank.I() != lp.data.I || lp.bank.J() != lp.data.J) {
            throw ConfigError("experiment.dataset: bank shape does not match the dataset");
        }
        if (!lp.data.truth_eta.empty()) {
            if (lp.data.truth_eta.size() != grid.nomega()) {
                throw ConfigError("experiment.dataset: truth_eta has " + std::to_string(lp.data.truth_eta.size()) +
                                  " entries for " + std::to_string(grid.nomega()) + " omega nodes");
            }
            lp.truth = lp.data.truth_eta;
        }
        return lp;
    }
    lp.bank = make_default_bank(grid, x.I, x.J, {x.window_lo, x.window_hi}, x.seed);
    const auto truth = x.truth.build(grid);
    lp.data = generate_dataset(grid, table, lp.bank, truth, {x.noise, x.noise_model, x.seed}, jobs);
    lp.truth = std::vector<double>(truth.values().begin(), truth.values().end());
    lp.generated = true;
    return lp;
}

json eta_spec_summary(const EtaSpec& e) {
    RunConfig tmp;
    tmp.inversion.initial = {e};
    return config_to_json(tmp)["inversion"]["initial"][0];
}

}  // namespace

int cmd_forward(const RunConfig& cfg, const RunContext& ctx) {
    const auto t0 = Clock::now();
    const auto grid = cfg.grid.build();
    const MaxwellianTable table(grid);
    const auto eta = cfg.forward.eta.build(grid);
    const auto phi = build_phi(grid, table, cfg.forward.phi);
    const auto dir = prepare_dir(cfg);

    ForwardOptions opts;
    if (cfg.output.snapshots) opts.snapshot_levels = levels_for(grid, cfg.forward.snapshot_times);
    const auto sol = forward_solve(grid, table, eta, phi, opts);

    {
        CsvWriter csv(dir / "deltaT.csv", {"t", "deltaT"});
        for (std::size_t n = 0; n < grid.n_levels(); ++n) csv.row({grid.t(n), sol.surface_deltaT[n]});
    }
    for (const auto& [level, g] : sol.snapshots) write_snapshot(dir, "forward", grid, level, g);

    const auto mp = max_principle_check(sol, phi, cfg.forward.max_principle_bound);
    if (mp.trivial) {
        say(ctx, "sup|g|/sup|phi| = n/a (phi = 0)");
    } else {
        std::ostringstream os;
        os << "sup|g|/sup|phi| = " << mp.ratio << ", min g = " << mp.min_value
           << (mp.pass() ? "" : "  (maximum principle check FAILED)");
        say(ctx, os.str());
    }
    write_metadata(dir, "forward", cfg, ctx, grid,
                   {{"sup_ratio", mp.trivial ? json(nullptr) : json(mp.ratio)},
                    {"min_value", mp.min_value},
                    {"max_principle_pass", mp.pass()}},
                   t0);
    return exit_ok;
}

int cmd_adjoint(const RunConfig& cfg, const RunContext& ctx) {
    const auto t0 = Clock::now();
    const auto grid = cfg.grid.build();
    const MaxwellianTable table(grid);
    const auto eta = cfg.adjoint.eta.build(grid);
    const auto psi = MeasurementFunctional::kronecker(grid, cfg.adjoint.psi_time);
    const auto dir = prepare_dir(cfg);

    AdjointOptions opts;
    opts.boundary = cfg.adjoint.boundary;
    opts.mollify_width = cfg.adjoint.mollify_width;
    if (cfg.output.snapshots) opts.snapshot_levels = levels_for(grid, cfg.adjoint.snapshot_times);
    const auto adj = adjoint_solve(grid, table, eta, psi, opts);
    for (const auto& [level, h] : adj.snapshots) write_snapshot(dir, "adjoint", grid, level, h);

    json extra = {{"sup_norm", adj.sup_norm},
                  {"boundary", cfg.adjoint.boundary == AdjointBoundary::surface ? "surface" : "interface_demo"}};
    if (cfg.adjoint.boundary == AdjointBoundary::surface) {
        const auto phi = build_phi(grid, table, cfg.forward.phi);
        const auto fwd = forward_solve(grid, table, eta, phi);
        const auto density = frechet_gradient(grid, table, fwd, adj);
        const auto nodal = nodal_gradient(grid, density);
        CsvWriter csv(dir / "gradient.csv", {"omega", "density", "nodal"});
        for (std::size_t m = 0; m < grid.nomega(); ++m) csv.row({grid.omega(m), density[m], nodal[m]});
        extra["measurement"] = surface_functional(grid, fwd.surface_deltaT, psi.values());
    }
    std::ostringstream os;
    os << "sup|h| = " << adj.sup_norm;
    say(ctx, os.str());
    write_metadata(dir, "adjoint", cfg, ctx, grid, extra, t0);
    return exit_ok;
}

int cmd_generate(const RunConfig& cfg, const RunContext& ctx) {
    const auto t0 = Clock::now();
    const auto grid = cfg.grid.build();
    const MaxwellianTable table(grid);
    const auto& x = cfg.experiment;
    const auto bank = make_default_bank(grid, x.I, x.J, {x.window_lo, x.window_hi}, x.seed);
    const auto truth = x.truth.build(grid);
    const auto data = generate_dataset(grid, table, bank, truth, {x.noise, x.noise_model, x.seed}, ctx.jobs);
    const auto dir = prepare_dir(cfg);
    save_dataset(data, dir / "dataset.csv");
    const auto hash = dataset_hash(data);
    say(ctx, "wrote " + (dir / "dataset.csv").string() + " (" + std::to_string(data.I) + "x" +
                 std::to_string(data.J) + ", hash " + hash + ")");
    write_metadata(dir, "generate", cfg, ctx, grid, {{"dataset_hash", hash}, {"dataset", "dataset.csv"}}, t0);
    return exit_ok;
}

int cmd_reconstruct(const RunConfig& cfg, const RunContext& ctx) {
    const auto t0 = Clock::now();
    const auto grid = cfg.grid.build();
    const MaxwellianTable table(grid);
    const auto dir = prepare_dir(cfg);
    const auto lp = load_or_generate(cfg, grid, table, ctx.jobs);
    if (lp.generated) save_dataset(lp.data, dir / "dataset.csv");
    const InverseProblem problem{grid, table, lp.bank, lp.data};
    const auto& inv = cfg.inversion;

    std::vector<EtaSpec> initial = inv.initial;
    if (initial.empty()) {
        EtaSpec e;
        if (inv.mode == InversionMode::free) {
            e.kind = EtaSpec::Kind::constant;
            e.value = 0.5;
        }
        initial.push_back(e);
    }

    SgdSettings settings;
    settings.alpha = inv.alpha;
    settings.alpha_target = inv.alpha_target;
    settings.decay_n0 = inv.decay_n0;
    settings.max_iters = inv.max_iters;
    settings.epsilon = inv.epsilon;
    settings.concurrent = inv.concurrent;
    settings.snapshot_iters = inv.snapshot_iters;

    json runs = json::array();
    for (std::size_t k = 0; k < initial.size(); ++k) {
        const std::string suffix = initial.size() > 1 ? "_" + std::to_string(k + 1) : "";
        ReconstructionState state = inv.mode == InversionMode::free
                                        ? make_free_state(grid, initial[k].build(grid), inv.seed, lp.truth)
                                        : make_parametrized_state(grid, initial[k].params, inv.seed, lp.truth);
        const auto res = reconstruct(problem, std::move(state), settings);
        const auto& s = res.state;

        {
            CsvWriter csv(dir / ("history" + suffix + ".csv"), {"n", "i", "j", "loss_sample", "error", "a", "b"});
            const bool param = s.mode == InversionMode::parametrized;
            for (std::size_t n = 0; n <= s.n; ++n) {
                // Row n: the sample that produced iterate n (none for n = 0) and the error of iterate n.
                const bool has_sample = n > 0 && n - 1 < s.gamma_history.size();
                const double gi = has_sample ? static_cast<double>(s.gamma_history[n - 1].i + 1) : nan_value;
                const double gj = has_sample ? static_cast<double>(s.gamma_history[n - 1].j + 1) : nan_value;
                const double ls = has_sample ? s.loss_history[n - 1] : nan_value;
                const double err = n < s.error_history.size() ? s.error_history[n] : nan_value;
                const double a = param && n < s.param_history.size() ? s.param_history[n].a : nan_value;
                const double b = param && n < s.param_history.size() ? s.param_history[n].b : nan_value;
                csv.row({static_cast<double>(n), gi, gj, ls, err, a, b});
            }
        }
        {
            CsvWriter csv(dir / ("eta_final" + suffix + ".csv"), {"omega", "eta", "eta_ref"});
            for (std::size_t m = 0; m < grid.nomega(); ++m)
                csv.row({grid.omega(m), s.eta[m], lp.truth ? (*lp.truth)[m] : nan_value});
        }
        if (!res.snapshots.empty()) {
            CsvWriter csv(dir / ("eta_snapshots" + suffix + ".csv"), {"n", "omega", "eta"});
            for (const auto& [n, eta] : res.snapshots)
                for (std::size_t m = 0; m < grid.nomega(); ++m)
                    csv.row({static_cast<double>(n), grid.omega(m), eta[m]});
        }

        const double full_loss = loss(problem, s.eta, ctx.jobs);
        json run = {{"initial", eta_spec_summary(initial[k])},
                    {"alpha", s.schedule.alpha0},
                    {"iterations", s.n},
                    {"converged", res.converged},
                    {"rejected_steps", res.rejected_steps},
                    {"final_loss", full_loss}};
        std::ostringstream os;
        os << "run " << k + 1 << ": n=" << s.n << " alpha=" << s.schedule.alpha0 << " loss=" << full_loss;
        if (!s.error_history.empty()) {
            run["initial_error"] = s.error_history.front();
            run["final_error"] = s.error_history.back();
            os << " error " << s.error_history.front() << " -> " << s.error_history.back();
        }
        if (s.mode == InversionMode::parametrized) {
            run["final_params"] = {{"a", s.params.a}, {"b", s.params.b}};
            os << " (a, b) = (" << s.params.a << ", " << s.params.b << ")";
        }
        say(ctx, os.str());
        runs.push_back(run);
    }

    write_metadata(dir, "reconstruct", cfg, ctx, grid,
                   {{"dataset_hash", dataset_hash(lp.data)},
                    {"dataset", lp.generated ? "dataset.csv" : cfg.experiment.dataset},
                    {"runs", runs}},
                   t0);
    return exit_ok;
}

std::vector<VerifyRow> verify_battery(const RunConfig& cfg, std::size_t jobs, std::ostream* log) {
    const auto grid = cfg.grid.build();
    const MaxwellianTable table(grid);
    const auto& v = cfg.verify;
    std::vector<VerifyRow> rows;
    auto add = [&](std::string probe, double value, const char* rel, double tol) {
        const bool pass = std::string(rel) == "<=" ? value <= tol : value >= tol;
        rows.push_back({std::move(probe), value, tol, rel, pass});
        if (log) {
            *log << std::left << std::setw(28) << rows.back().probe << std::setw(14) << std::setprecision(6)
                 << value << rel << " " << std::setw(10) << tol << (pass ? "PASS" : "FAIL") << '\n';
        }
    };

    add("conservation", conservation_probe(grid, table, v.trials, v.seed), "<=", 1e-12);
    add("equilibrium", equilibrium_deviation(grid, table), "<=", 1e-12);
    add("self_adjoint", selfadjoint_probe(grid, table, v.trials, v.seed), "<=", 1e-12);

    const auto truth = cfg.experiment.truth.build(grid);
    const auto phi = build_phi(grid, table, cfg.forward.phi);
    const auto psi = MeasurementFunctional::kronecker_level(grid, grid.nt());
    const auto coarse = gradient_check(grid, table, truth, phi, psi, v.fd_h, jobs);
    add("gradient_fd_rel_l2", coarse.rel_l2_error, "<=", v.fd_tol);
    if (v.refinement) {
        const auto fine_grid = PhaseGrid::make(refined_counts(grid));
        const MaxwellianTable fine_table(fine_grid);
        const auto fine_truth = cfg.experiment.truth.build(fine_grid);
        const auto fine_phi = build_phi(fine_grid, fine_table, cfg.forward.phi);
        const auto fine_psi = MeasurementFunctional::kronecker_level(fine_grid, fine_grid.nt());
        const auto fine = gradient_check(fine_grid, fine_table, fine_truth, fine_phi, fine_psi, v.fd_h, jobs);
        const double ratio = coarse.rel_l2_error > 0.0 ? fine.rel_l2_error / coarse.rel_l2_error : 0.0;
        add("gradient_refinement_ratio", ratio, "<=", 0.6);
    }

    // Second-order remainder of the linearization: halving the perturbation should cut it by ~4.
    {
        std::mt19937_64 rng(v.seed);
        std::vector<double> dir(grid.nomega());
        for (double& d : dir) d = 0.05 * uniform_pm1(rng);
        const auto mg = measurement_gradient(grid, table, truth, phi, psi);
        const auto nodal = nodal_gradient(grid, mg.density);
        auto remainder = [&](double scale) {
            std::vector<double> e(truth.values().begin(), truth.values().end());
            double lin = 0.0;
            for (std::size_t m = 0; m < e.size(); ++m) {
                e[m] += scale * dir[m];
                lin += nodal[m] * scale * dir[m];
            }
            return std::abs(measurement(grid, table, ReflectionCoeff::projected(e), phi, psi) - mg.value - lin);
        };
        const double r1 = remainder(1.0);
        const double r2 = remainder(0.5);
        add("duality_remainder_ratio", r2 > 0.0 ? r1 / r2 : 4.0, ">=", 1.9);
    }

    {
        std::mt19937_64 rng(v.seed + 1);
        double gap = std::numeric_limits<double>::infinity();
        double margin = std::numeric_limits<double>::infinity();
        const std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        for (std::size_t p = 0; p < v.convexity_pairs; ++p) {
            std::vector<double> e1(grid.nomega());
            std::vector<double> e2(grid.nomega());
            for (std::size_t m = 0; m < e1.size(); ++m) {
                const double u = 0.5 * (uniform_pm1(rng) + 1.0);
                const double w = 0.5 * (uniform_pm1(rng) + 1.0);
                e1[m] = std::max(u, w);
                e2[m] = std::min(u, w);
            }
            const auto rep = convexity_sweep(grid, table, phi, ReflectionCoeff(e1), ReflectionCoeff(e2), alphas);
            gap = std::min(gap, rep.monotone_gap);
            margin = std::min(margin, rep.worst_margin);
        }
        add("monotonicity_gap", gap, ">=", -1e-12);
        add("convexity_margin", margin, ">=", -1e-10);
    }

    {
        const auto sol = forward_solve(grid, table, truth, phi);
        const auto mp = max_principle_check(sol, phi, cfg.forward.max_principle_bound);
        add("max_principle_ratio", mp.trivial ? 0.0 : mp.ratio, "<=", cfg.forward.max_principle_bound);
        add("positivity_min", sol.min_value, ">=", -1e-12);
    }

    {
        // Linearity in phi on the surface trace and the final field.
        const auto phi2 = BoundarySource::from_profile(grid, table.gstar());
        ForwardOptions opts;
        opts.snapshot_levels = {grid.nt()};
        const auto s1 = forward_solve(grid, table, truth, phi, opts);
        const auto s2 = forward_solve(grid, table, truth, phi2, opts);
        const auto s3 = forward_solve(grid, table, truth, phi.scaled(2.0).plus(phi2.scaled(-3.0)), opts);
        double worst = 0.0;
        double scale = 0.0;
        for (std::size_t n = 0; n < grid.n_levels(); ++n) {
            const double expect = 2.0 * s1.surface_deltaT[n] - 3.0 * s2.surface_deltaT[n];
            worst = std::max(worst, std::abs(s3.surface_deltaT[n] - expect));
            scale = std::max(scale, std::abs(expect));
        }
        const auto a = s1.snapshots.at(grid.nt()).values();
        const auto b = s2.snapshots.at(grid.nt()).values();
        const auto c = s3.snapshots.at(grid.nt()).values();
        for (std::size_t q = 0; q < a.size(); ++q) {
            const double expect = 2.0 * a[q] - 3.0 * b[q];
            worst = std::max(worst, std::abs(c[q] - expect));
            scale = std::max(scale, std::abs(expect));
        }
        add("linearity_phi", scale > 0.0 ? worst / scale : worst, "<=", 1e-12);
    }
    return rows;
}

int cmd_verify(const RunConfig& cfg, const RunContext& ctx) {
    const auto t0 = Clock::now();
    const auto grid = cfg.grid.build();
    const auto dir = prepare_dir(cfg);
    const auto rows = verify_battery(cfg, ctx.jobs, ctx.log);
    bool all = true;
    json table = json::array();
    {
        std::ofstream out(dir / "verify.csv", std::ios::binary);
        out << "probe,value,relation,tolerance,pass\n";
        for (const auto& r : rows) {
            out << r.probe << ',' << format_number(r.value) << ',' << r.relation << ',' << format_number(r.tolerance)
                << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
            all = all && r.pass;
            table.push_back({{"probe", r.probe}, {"value", r.value}, {"pass", r.pass}});
        }
    }
    say(ctx, all ? "verify: all probes passed" : "verify: FAILED");
    write_metadata(dir, "verify", cfg, ctx, grid, {{"probes", table}, {"pass", all}}, t0);
    return all ? exit_ok : exit_verify;
}

int run_command(const std::string& command, const RunConfig& cfg, const RunContext& ctx, std::ostream& err) {
    const std::string where = "phonon-inverse " + command + ": ";
    try {
        validate(cfg);
    } catch (const std::exception& e) {
        err << where << "config: " << e.what() << '\n';
        return exit_usage;
    }
    try {
        if (command == "forward") return cmd_forward(cfg, ctx);
        if (command == "adjoint") return cmd_adjoint(cfg, ctx);
        if (command == "generate") return cmd_generate(cfg, ctx);
        if (command == "reconstruct") return cmd_reconstruct(cfg, ctx);
        if (command == "verify") return cmd_verify(cfg, ctx);
        err << where << "unknown command\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        err << where << "config: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError& e) {
        err << where << "data: " << e.what() << '\n';
        return exit_usage;
    } catch (const SolverError& e) {
        err << where << "solver: " << e.what() << '\n';
        return exit_solver;
    } catch (const std::exception& e) {
        err << where << e.what() << '\n';
        return exit_solver;
    }
}

}  // namespace phonon::cli
