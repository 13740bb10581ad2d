#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "phonon/experiment.hpp"
#include "phonon/grid.hpp"
#include "phonon/physics.hpp"
#include "phonon/reflection.hpp"

namespace phonon {

/**
 * Kronecker injections phi_i = delta(omega - omega_i) for the first I omega
 * nodes (i = 1 maps to omega_min) and Kronecker-in-time measurements.
 * J = 1 measures at t_max; J > 1 draws J distinct time levels uniformly from
 * those inside `window` using `seed`.
 */
ExperimentBank make_default_bank(const PhaseGrid& grid, std::size_t I, std::size_t J,
                                       std::pair<double, double> window = {4.5, 5.0}, std::uint64_t seed = 0);

// Rebuild a bank from stored provenance (omega node per phi, time level per psi).
ExperimentBank make_bank(const PhaseGrid& grid, const std::vector<std::size_t>& phi_omega_index,
                         const std::vector<std::size_t>& psi_level);

// d_ij = M_ij(eta) (1 + level u_ij) (multiplicative) or M_ij(eta) + level u_ij (additive),
// u_ij ~ Uniform(-1, 1) drawn in row-major order from seed.
Dataset generate_dataset(const PhaseGrid& grid, const MaxwellianTable& table, const ExperimentBank& bank,
                         const ReflectionCoeff& eta_truth, const NoiseDescriptor& noise, std::size_t jobs = 1);

// Uniform(-1, 1) from the top 53 bits of one engine draw.
double uniform_pm1(std::mt19937_64& rng);

std::string serialize_dataset(const Dataset& data);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// FNV-1a 64 of the serialized form, as 16 hex digits.
std::string dataset_hash(const Dataset& data);

const char* to_string(NoiseModel model);
NoiseModel noise_model_from_string(const std::string& name);

}  // namespace phonon
