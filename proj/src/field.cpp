#include "phonon/field.hpp"

#include <algorithm>
#include <cmath>

#include "phonon/errors.hpp"

namespace phonon {

double KineticField::sup_norm() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

double KineticField::min_value() const {
    double s = values_.empty() ? 0.0 : values_.front();
    for (double v : values_) s = std::min(s, v);
    return s;
}

bool KineticField::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

KineticField KineticField::broadcast(const PhaseGrid& grid, std::span<const double> per_omega) {
    if (per_omega.size() != grid.nomega()) throw StructuralError("broadcast: profile size != nomega");
    KineticField f(grid);
    for (std::size_t i = 0; i < grid.nx(); ++i)
        for (std::size_t k = 0; k < grid.nmu(); ++k)
            for (std::size_t m = 0; m < grid.nomega(); ++m) f(i, k, m) = per_omega[m];
    return f;
}

std::vector<double> integrate_omega(const PhaseGrid& grid, const KineticField& g) {
    std::vector<double> out(grid.nx() * grid.nmu(), 0.0);
    for (std::size_t i = 0; i < grid.nx(); ++i)
        for (std::size_t k = 0; k < grid.nmu(); ++k) {
            double s = 0.0;
            for (std::size_t m = 0; m < grid.nomega(); ++m) s += g(i, k, m);
            out[i * grid.nmu() + k] = s * grid.weight_omega();
        }
    return out;
}

std::vector<double> integrate_mu(const PhaseGrid& grid, const KineticField& g) {
    std::vector<double> out(grid.nx() * grid.nomega(), 0.0);
    for (std::size_t i = 0; i < grid.nx(); ++i)
        for (std::size_t k = 0; k < grid.nmu(); ++k)
            for (std::size_t m = 0; m < grid.nomega(); ++m)
                out[i * grid.nomega() + m] += g(i, k, m) * grid.weight_mu();
    return out;
}

}  // namespace phonon
