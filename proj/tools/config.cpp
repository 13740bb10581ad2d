#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "phonon/data.hpp"
#include "phonon/errors.hpp"

namespace phonon::cli {

using nlohmann::json;

namespace {

// Reads members of one JSON object and rejects any key it was not asked about.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(field(key) + ": wrong type");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* sub(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
        }
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

EtaSpec eta_from_json(const json& j, const std::string& path) {
    Reader r(j, path);
    EtaSpec e;
    std::string kind = "params";
    r.get("kind", kind);
    if (kind == "params") {
        e.kind = EtaSpec::Kind::params;
        r.get("a", e.params.a);
        r.get("b", e.params.b);
    } else if (kind == "constant") {
        e.kind = EtaSpec::Kind::constant;
        r.get("value", e.value);
    } else if (kind == "quadratic") {
        e.kind = EtaSpec::Kind::quadratic;
        r.get("value", e.value);
        r.get("c2", e.c2);
        r.get("center", e.center);
    } else if (kind == "values") {
        e.kind = EtaSpec::Kind::values;
        r.get("values", e.values);
    } else {
        throw ConfigError(r.field("kind") + ": expected params|constant|quadratic|values, got '" + kind + "'");
    }
    r.finish();
    return e;
}

json eta_to_json(const EtaSpec& e) {
    switch (e.kind) {
        case EtaSpec::Kind::params:
            return {{"kind", "params"}, {"a", e.params.a}, {"b", e.params.b}};
        case EtaSpec::Kind::constant:
            return {{"kind", "constant"}, {"value", e.value}};
        case EtaSpec::Kind::quadratic:
            return {{"kind", "quadratic"}, {"value", e.value}, {"c2", e.c2}, {"center", e.center}};
        case EtaSpec::Kind::values:
            return {{"kind", "values"}, {"values", e.values}};
    }
    return {};
}

GridBlock grid_from_json(const json& j) {
    Reader r(j, "grid");
    GridBlock g;
    g.by_counts = r.has("nx") || r.has("nt") || r.has("nmu") || r.has("nomega");
    if (g.by_counts) {
        if (r.has("dx") || r.has("dt") || r.has("dmu") || r.has("domega")) {
            throw ConfigError("grid: give either spacings (dx, dt, dmu, domega) or counts (nx, nt, nmu, nomega)");
        }
        auto& c = g.counts;
        r.get("x_max", c.x_max);
        r.get("t_max", c.t_max);
        r.get("omega_min", c.omega_min);
        r.get("omega_max", c.omega_max);
        r.get("nx", c.nx);
        r.get("nt", c.nt);
        r.get("nmu", c.nmu);
        r.get("nomega", c.nomega);
    } else {
        auto& s = g.spacing;
        r.get("x_max", s.x_max);
        r.get("t_max", s.t_max);
        r.get("omega_min", s.omega_min);
        r.get("omega_max", s.omega_max);
        r.get("dx", s.dx);
        r.get("dt", s.dt);
        r.get("dmu", s.dmu);
        r.get("domega", s.domega);
    }
    r.finish();
    return g;
}

json grid_to_json(const GridBlock& g) {
    if (g.by_counts) {
        const auto& c = g.counts;
        return {{"x_max", c.x_max}, {"t_max", c.t_max}, {"omega_min", c.omega_min}, {"omega_max", c.omega_max},
                {"nx", c.nx},       {"nt", c.nt},       {"nmu", c.nmu},             {"nomega", c.nomega}};
    }
    const auto& s = g.spacing;
    return {{"x_max", s.x_max}, {"t_max", s.t_max}, {"omega_min", s.omega_min}, {"omega_max", s.omega_max},
            {"dx", s.dx},       {"dt", s.dt},       {"dmu", s.dmu},             {"domega", s.domega}};
}

ExperimentBlock experiment_from_json(const json& j) {
    Reader r(j, "experiment");
    ExperimentBlock e;
    r.get("I", e.I);
    r.get("J", e.J);
    std::vector<double> window{e.window_lo, e.window_hi};
    r.get("window", window);
    if (window.size() != 2) throw ConfigError("experiment.window: expected [lo, hi]");
    e.window_lo = window[0];
    e.window_hi = window[1];
    r.get("seed", e.seed);
    r.get("noise", e.noise);
    std::string model = to_string(e.noise_model);
    r.get("noise_model", model);
    try {
        e.noise_model = noise_model_from_string(model);
    } catch (const std::exception&) {
        throw ConfigError("experiment.noise_model: expected multiplicative|additive");
    }
    if (const json* t = r.sub("truth")) e.truth = eta_from_json(*t, "experiment.truth");
    r.get("dataset", e.dataset);
    r.finish();
    return e;
}

std::vector<double> times_from(Reader& r, const char* key) {
    std::vector<double> v;
    r.get(key, v);
    return v;
}

ForwardBlock forward_from_json(const json& j) {
    Reader r(j, "forward");
    ForwardBlock f;
    if (const json* e = r.sub("eta")) f.eta = eta_from_json(*e, "forward.eta");
    if (const json* p = r.sub("phi")) {
        Reader pr(*p, "forward.phi");
        std::string kind = "kronecker";
        pr.get("kind", kind);
        if (kind == "kronecker") {
            f.phi.kind = PhiSpec::Kind::kronecker;
            pr.get("omega", f.phi.omega);
        } else if (kind == "zero") {
            f.phi.kind = PhiSpec::Kind::zero;
        } else if (kind == "gstar") {
            f.phi.kind = PhiSpec::Kind::gstar;
        } else {
            throw ConfigError("forward.phi.kind: expected kronecker|zero|gstar, got '" + kind + "'");
        }
        pr.finish();
    }
    f.snapshot_times = times_from(r, "snapshot_times");
    r.get("max_principle_bound", f.max_principle_bound);
    r.finish();
    return f;
}

json phi_to_json(const PhiSpec& p) {
    switch (p.kind) {
        case PhiSpec::Kind::kronecker:
            return {{"kind", "kronecker"}, {"omega", p.omega}};
        case PhiSpec::Kind::zero:
            return {{"kind", "zero"}};
        case PhiSpec::Kind::gstar:
            return {{"kind", "gstar"}};
    }
    return {};
}

AdjointBlock adjoint_from_json(const json& j) {
    Reader r(j, "adjoint");
    AdjointBlock a;
    if (const json* e = r.sub("eta")) a.eta = eta_from_json(*e, "adjoint.eta");
    std::string boundary = "surface";
    r.get("boundary", boundary);
    if (boundary == "surface") {
        a.boundary = AdjointBoundary::surface;
    } else if (boundary == "interface_demo") {
        a.boundary = AdjointBoundary::interface_demo;
    } else {
        throw ConfigError("adjoint.boundary: expected surface|interface_demo, got '" + boundary + "'");
    }
    r.get("psi_time", a.psi_time);
    r.get("mollify_width", a.mollify_width);
    a.snapshot_times = times_from(r, "snapshot_times");
    r.finish();
    return a;
}

InversionBlock inversion_from_json(const json& j) {
    Reader r(j, "inversion");
    InversionBlock v;
    std::string mode = "free";
    r.get("mode", mode);
    if (mode == "free") {
        v.mode = InversionMode::free;
    } else if (mode == "parametrized") {
        v.mode = InversionMode::parametrized;
    } else {
        throw ConfigError("inversion.mode: expected parametrized|free, got '" + mode + "'");
    }
    if (const json* init = r.sub("initial")) {
        if (!init->is_array()) throw ConfigError("inversion.initial: expected a list of eta specs");
        for (std::size_t q = 0; q < init->size(); ++q) {
            v.initial.push_back(eta_from_json((*init)[q], "inversion.initial[" + std::to_string(q) + "]"));
        }
    }
    r.get("alpha", v.alpha);
    r.get("alpha_target", v.alpha_target);
    r.get("decay_n0", v.decay_n0);
    r.get("max_iters", v.max_iters);
    r.get("epsilon", v.epsilon);
    r.get("seed", v.seed);
    r.get("concurrent", v.concurrent);
    r.get("snapshot_iters", v.snapshot_iters);
    r.finish();
    return v;
}

VerifyBlock verify_from_json(const json& j) {
    Reader r(j, "verify");
    VerifyBlock v;
    r.get("fd_h", v.fd_h);
    r.get("fd_tol", v.fd_tol);
    r.get("trials", v.trials);
    r.get("convexity_pairs", v.convexity_pairs);
    r.get("seed", v.seed);
    r.get("refinement", v.refinement);
    r.finish();
    return v;
}

OutputBlock output_from_json(const json& j) {
    Reader r(j, "output");
    OutputBlock o;
    r.get("dir", o.dir);
    r.get("snapshots", o.snapshots);
    r.finish();
    return o;
}

}  // namespace

PhaseGrid GridBlock::build() const { return by_counts ? PhaseGrid::make(counts) : PhaseGrid::make(spacing); }

ReflectionCoeff EtaSpec::build(const PhaseGrid& grid) const {
    switch (kind) {
        case Kind::params:
            return eta_from_params(params, grid);
        case Kind::constant:
            return ReflectionCoeff::constant(grid, value);
        case Kind::quadratic: {
            std::vector<double> v(grid.nomega());
            for (std::size_t m = 0; m < v.size(); ++m) {
                const double d = grid.omega(m) - center;
                v[m] = value - c2 * d * d;
            }
            return ReflectionCoeff(std::move(v));
        }
        case Kind::values:
            if (values.size() != grid.nomega()) {
                throw ConfigError("eta.values: " + std::to_string(values.size()) + " entries for " +
                                  std::to_string(grid.nomega()) + " omega nodes");
            }
            return ReflectionCoeff(values);
    }
    throw ConfigError("eta: bad kind");
}

RunConfig config_from_json(const json& j) {
    Reader r(j, "");
    RunConfig c;
    if (const json* g = r.sub("grid")) c.grid = grid_from_json(*g);
    if (const json* e = r.sub("experiment")) c.experiment = experiment_from_json(*e);
    if (const json* f = r.sub("forward")) c.forward = forward_from_json(*f);
    if (const json* a = r.sub("adjoint")) c.adjoint = adjoint_from_json(*a);
    if (const json* v = r.sub("inversion")) c.inversion = inversion_from_json(*v);
    if (const json* v = r.sub("verify")) c.verify = verify_from_json(*v);
    if (const json* o = r.sub("output")) c.output = output_from_json(*o);
    r.finish();
    return c;
}

json config_to_json(const RunConfig& c) {
    json initial = json::array();
    for (const auto& e : c.inversion.initial) initial.push_back(eta_to_json(e));
    const auto& x = c.experiment;
    return {
        {"grid", grid_to_json(c.grid)},
        {"experiment",
         {{"I", x.I},
          {"J", x.J},
          {"window", {x.window_lo, x.window_hi}},
          {"seed", x.seed},
          {"noise", x.noise},
          {"noise_model", to_string(x.noise_model)},
          {"truth", eta_to_json(x.truth)},
          {"dataset", x.dataset}}},
        {"forward",
         {{"eta", eta_to_json(c.forward.eta)},
          {"phi", phi_to_json(c.forward.phi)},
          {"snapshot_times", c.forward.snapshot_times},
          {"max_principle_bound", c.forward.max_principle_bound}}},
        {"adjoint",
         {{"eta", eta_to_json(c.adjoint.eta)},
          {"boundary", c.adjoint.boundary == AdjointBoundary::surface ? "surface" : "interface_demo"},
          {"psi_time", c.adjoint.psi_time},
          {"mollify_width", c.adjoint.mollify_width},
          {"snapshot_times", c.adjoint.snapshot_times}}},
        {"inversion",
         {{"mode", c.inversion.mode == InversionMode::free ? "free" : "parametrized"},
          {"initial", initial},
          {"alpha", c.inversion.alpha},
          {"alpha_target", c.inversion.alpha_target},
          {"decay_n0", c.inversion.decay_n0},
          {"max_iters", c.inversion.max_iters},
          {"epsilon", c.inversion.epsilon},
          {"seed", c.inversion.seed},
          {"concurrent", c.inversion.concurrent},
          {"snapshot_iters", c.inversion.snapshot_iters}}},
        {"verify",
         {{"fd_h", c.verify.fd_h},
          {"fd_tol", c.verify.fd_tol},
          {"trials", c.verify.trials},
          {"convexity_pairs", c.verify.convexity_pairs},
          {"seed", c.verify.seed},
          {"refinement", c.verify.refinement}}},
        {"output", {{"dir", c.output.dir}, {"snapshots", c.output.snapshots}}},
    };
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

GridBlock coarse_grid(std::size_t nt) {
    GridBlock g;
    g.by_counts = true;
    g.counts = GridCounts{0.5, 5.0, 0.1, 2.0, 10, 20, 20, nt};
    return g;
}

EtaSpec constant_eta(double v) {
    EtaSpec e;
    e.kind = EtaSpec::Kind::constant;
    e.value = v;
    return e;
}

EtaSpec params_eta(double a, double b) {
    EtaSpec e;
    e.params = {a, b};
    return e;
}

EtaSpec quadratic_eta(double c0, double c2) {
    EtaSpec e;
    e.kind = EtaSpec::Kind::quadratic;
    e.value = c0;
    e.c2 = c2;
    e.center = 0.05;
    return e;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig3", "fig5", "example1", "example1b", "example2", "example3", "example3p", "verify"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.output.dir = "out/" + name;
    if (name == "fig3") {
        c.forward.snapshot_times = {0.01, 0.5, 1.0, 3.0};
    } else if (name == "fig5") {
        c.adjoint.boundary = AdjointBoundary::interface_demo;
        c.adjoint.snapshot_times = {5.0, 4.0, 2.0, 0.01};
    } else if (name == "example1" || name == "example1b") {
        c.grid = coarse_grid(250);
        c.experiment.I = 20;
        c.inversion.mode = InversionMode::parametrized;
        const double b0 = name == "example1" ? 0.4 : 0.5;
        c.inversion.initial = {params_eta(1.0, 1.5), params_eta(2.0, b0), params_eta(2.0, 1.5)};
        c.inversion.alpha = 1500.0;
    } else if (name == "example2") {
        c.grid = coarse_grid(250);
        c.experiment.I = 20;
        c.inversion.initial = {constant_eta(0.5), quadratic_eta(0.4750, 0.05), quadratic_eta(0.4891, 0.1)};
        c.inversion.snapshot_iters = {100, 200, 500, 3000};
    } else if (name == "example3" || name == "example3p") {
        c.grid = coarse_grid(500);
        c.experiment.I = 20;
        c.experiment.noise = 0.025;
        if (name == "example3") {
            c.experiment.J = 50;
            c.inversion.initial = {constant_eta(0.5)};
            c.inversion.snapshot_iters = {100, 200, 500, 3000};
        } else {
            c.inversion.mode = InversionMode::parametrized;
            c.inversion.initial = {params_eta(1.0, 1.5), params_eta(2.0, 0.5), params_eta(2.0, 1.5)};
            c.inversion.alpha = 1500.0;
        }
    } else if (name == "verify") {
        c.grid = coarse_grid(250);
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += " " + n;
        throw ConfigError("unknown preset '" + name + "' (known:" + known + ")");
    }
    return c;
}

void validate(const RunConfig& c) {
    const PhaseGrid grid = c.grid.build();
    const auto& x = c.experiment;
    if (x.I == 0 || x.J == 0) throw ConfigError("experiment: I and J must be at least 1");
    if (x.I > grid.nomega()) {
        throw ConfigError("experiment.I: " + std::to_string(x.I) + " exceeds " + std::to_string(grid.nomega()) +
                          " omega nodes");
    }
    if (x.noise < 0.0) throw ConfigError("experiment.noise: must be >= 0");
    if (!(x.window_lo <= x.window_hi)) throw ConfigError("experiment.window: lo > hi");
    if (c.inversion.max_iters == 0) throw ConfigError("inversion.max_iters: must be >= 1");
    if (c.inversion.epsilon < 0.0) throw ConfigError("inversion.epsilon: must be >= 0");
    if (c.inversion.alpha_target <= 0.0) throw ConfigError("inversion.alpha_target: must be > 0");
    if (c.verify.fd_h <= 0.0) throw ConfigError("verify.fd_h: must be > 0");
    if (c.adjoint.mollify_width < 0.0) throw ConfigError("adjoint.mollify_width: must be >= 0");
    for (double t : c.forward.snapshot_times)
        if (t < 0.0 || t > grid.t_max()) throw ConfigError("forward.snapshot_times: outside [0, t_max]");
    for (double t : c.adjoint.snapshot_times)
        if (t < 0.0 || t > grid.t_max()) throw ConfigError("adjoint.snapshot_times: outside [0, t_max]");
    if (c.adjoint.psi_time < 0.0 || c.adjoint.psi_time > grid.t_max())
        throw ConfigError("adjoint.psi_time: outside [0, t_max]");
    try {
        c.forward.eta.build(grid);
        c.adjoint.eta.build(grid);
        c.experiment.truth.build(grid);
        if (c.inversion.mode == InversionMode::free) {
            for (const auto& e : c.inversion.initial) e.build(grid);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("eta: ") + e.what());
    }
    if (c.inversion.mode == InversionMode::parametrized) {
        for (const auto& e : c.inversion.initial)
            if (e.kind != EtaSpec::Kind::params)
                throw ConfigError("inversion.initial: parametrized mode needs kind=params");
    }
    if (c.forward.phi.kind == PhiSpec::Kind::kronecker &&
        (c.forward.phi.omega < grid.omega_min() - 0.5 * grid.domega() ||
         c.forward.phi.omega > grid.omega_max() + 0.5 * grid.domega())) {
        throw ConfigError("forward.phi.omega: outside the omega grid");
    }
}

}  // namespace phonon::cli
