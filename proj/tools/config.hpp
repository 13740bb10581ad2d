#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phonon/experiment.hpp"
#include "phonon/grid.hpp"
#include "phonon/inverse.hpp"
#include "phonon/physics.hpp"

namespace phonon::cli {

// Either spacings (dx, dt, dmu, domega) or node counts (nx, nt, nmu, nomega).
struct GridBlock {
    bool by_counts = false;
    GridSpacing spacing;
    GridCounts counts;
    bool operator==(const GridBlock&) const = default;
    PhaseGrid build() const;
};

// A reflection coefficient: tanh family, a constant, c0 - c2 (omega - center)^2,
// or explicit nodal values.
struct EtaSpec {
    enum class Kind { params, constant, quadratic, values };
    Kind kind = Kind::params;
    TanhParams params;
    double value = 0.5;
    double c2 = 0.0;
    double center = 0.0;
    std::vector<double> values;
    bool operator==(const EtaSpec&) const = default;
    ReflectionCoeff build(const PhaseGrid& grid) const;
};

struct PhiSpec {
    enum class Kind { kronecker, zero, gstar };
    Kind kind = Kind::kronecker;
    double omega = 1.5;
    bool operator==(const PhiSpec&) const = default;
};

struct ExperimentBlock {
    std::size_t I = 20;
    std::size_t J = 1;
    double window_lo = 4.5;
    double window_hi = 5.0;
    std::uint64_t seed = 1;
    double noise = 0.0;
    NoiseModel noise_model = NoiseModel::multiplicative;
    EtaSpec truth;
    std::string dataset;  // load instead of generating when non-empty
    bool operator==(const ExperimentBlock&) const = default;
};

struct ForwardBlock {
    EtaSpec eta;
    PhiSpec phi;
    std::vector<double> snapshot_times;
    double max_principle_bound = 10.0;
    bool operator==(const ForwardBlock&) const = default;
};

struct AdjointBlock {
    EtaSpec eta;
    AdjointBoundary boundary = AdjointBoundary::surface;
    double psi_time = 5.0;
    double mollify_width = 0.0;
    std::vector<double> snapshot_times;
    bool operator==(const AdjointBlock&) const = default;
};

struct InversionBlock {
    InversionMode mode = InversionMode::free;
    std::vector<EtaSpec> initial;  // one run per entry
    double alpha = 0.0;            // <= 0: automatic
    double alpha_target = 0.01;
    double decay_n0 = 0.0;
    std::size_t max_iters = 3000;
    double epsilon = 0.0;
    std::uint64_t seed = 42;
    bool concurrent = false;
    std::vector<std::size_t> snapshot_iters;
    bool operator==(const InversionBlock&) const = default;
};

struct VerifyBlock {
    double fd_h = 1e-3;
    double fd_tol = 0.02;
    std::size_t trials = 100;
    std::size_t convexity_pairs = 5;
    std::uint64_t seed = 7;
    bool refinement = true;
    bool operator==(const VerifyBlock&) const = default;
};

struct OutputBlock {
    std::string dir = "out";
    bool snapshots = true;
    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    GridBlock grid;
    ExperimentBlock experiment;
    ForwardBlock forward;
    AdjointBlock adjoint;
    InversionBlock inversion;
    VerifyBlock verify;
    OutputBlock output;
    bool operator==(const RunConfig&) const = default;
};

// Parsing rejects unknown keys; errors are ConfigError naming the field path.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Shipped presets: fig3, fig5, example1, example2, example3, verify.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Checks grid and experiment preconditions before any solve.
void validate(const RunConfig& c);

}  // namespace phonon::cli
