#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phonon/adjoint.hpp"
#include "phonon/transport.hpp"

namespace phonon {

// Injection profiles phi_i and measurement functionals psi_j.
struct ExperimentBank {
    std::vector<BoundarySource> phis;
    std::vector<MeasurementFunctional> psis;
    // Provenance: omega node of each Kronecker phi_i and time level of each psi_j.
    std::vector<std::size_t> phi_omega_index;
    std::vector<std::size_t> psi_level;

    std::size_t I() const { return phis.size(); }
    std::size_t J() const { return psis.size(); }
};

enum class NoiseModel { multiplicative, additive };

struct NoiseDescriptor {
    double level = 0.0;
    NoiseModel model = NoiseModel::multiplicative;
    std::uint64_t seed = 0;
    bool operator==(const NoiseDescriptor&) const = default;
};

// Data d_ij, row-major (i * J + j).
struct Dataset {
    std::size_t I = 0;
    std::size_t J = 0;
    std::vector<double> values;
    NoiseDescriptor noise;
    // Bank provenance so a stored dataset can rebuild its experiments.
    std::vector<std::size_t> phi_omega_index;
    std::vector<std::size_t> psi_level;
    // Generator eta, when synthetic.
    std::vector<double> truth_eta;

    double at(std::size_t i, std::size_t j) const { return values.at(i * J + j); }
    bool noisy() const { return noise.level > 0.0; }
    bool operator==(const Dataset&) const = default;
};

struct Gamma {
    std::size_t i = 0;
    std::size_t j = 0;
    bool operator==(const Gamma&) const = default;
};

}  // namespace phonon
