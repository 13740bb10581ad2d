#include "phonon/physics.hpp"

#include <cmath>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

double gstar_at(double omega) {
    if (!(omega > 0.0)) {
        std::ostringstream msg;
        msg << "gstar_at: omega must be positive, got " << omega;
        throw DomainError(msg.str());
    }
    // omega^2 e^omega / (e^omega - 1)^2 == omega^2 e^-omega / (1 - e^-omega)^2
    const double em1 = -std::expm1(-omega);
    return omega * omega * std::exp(-omega) / (em1 * em1);
}

MaxwellianTable::MaxwellianTable(const PhaseGrid& grid) {
    const std::size_t nw = grid.nomega();
    omega_.assign(grid.omega_nodes().begin(), grid.omega_nodes().end());
    gstar_.resize(nw);
    maxwellian_.resize(nw);
    double s = 0.0;
    for (std::size_t m = 0; m < nw; ++m) {
        gstar_[m] = gstar_at(omega_[m]);
        s += omega_[m] * gstar_[m];
    }
    // mu weights sum to 2 on [-1, 1].
    z_norm_ = s * grid.weight_omega() * (grid.weight_mu() * static_cast<double>(grid.nmu()));
    for (std::size_t m = 0; m < nw; ++m) maxwellian_[m] = omega_[m] * gstar_[m] / z_norm_;
}

double omega_moment(const PhaseGrid& grid, std::span<const double> slice) {
    if (slice.size() != grid.slice_size()) throw StructuralError("omega_moment: slice size mismatch");
    const std::size_t nw = grid.nomega();
    const auto omega = grid.omega_nodes();
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.nmu(); ++k) {
        const double* row = slice.data() + k * nw;
        for (std::size_t m = 0; m < nw; ++m) sum += omega[m] * row[m];
    }
    return sum * grid.weight_mu() * grid.weight_omega();
}

double delta_T(const PhaseGrid& grid, const MaxwellianTable& table, std::span<const double> slice) {
    return omega_moment(grid, slice) / table.z_norm();
}

void collide(const PhaseGrid& grid, const MaxwellianTable& table, std::span<const double> slice,
             std::span<double> out) {
    if (out.size() != slice.size()) throw StructuralError("collide: output size mismatch");
    const double gain = omega_moment(grid, slice);
    const std::size_t nw = grid.nomega();
    const auto omega = grid.omega_nodes();
    const auto maxw = table.maxwellian();
    for (std::size_t k = 0; k < grid.nmu(); ++k)
        for (std::size_t m = 0; m < nw; ++m) {
            const std::size_t idx = k * nw + m;
            out[idx] = -omega[m] * slice[idx] + maxw[m] * gain;
        }
}

KineticField collide(const PhaseGrid& grid, const MaxwellianTable& table, const KineticField& g) {
    if (!g.matches(grid)) throw StructuralError("collide: field does not match grid");
    KineticField out(grid);
    for (std::size_t i = 0; i < grid.nx(); ++i) collide(grid, table, g.slice(i), out.slice(i));
    return out;
}

}  // namespace phonon
