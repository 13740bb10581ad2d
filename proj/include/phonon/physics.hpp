#pragma once

#include <span>
#include <vector>

#include "phonon/field.hpp"
#include "phonon/grid.hpp"

namespace phonon {

// g*(omega) = omega^2 e^omega / (e^omega - 1)^2, the linearised equilibrium kernel.
// Throws DomainError for omega <= 0.
double gstar_at(double omega);

/**
 * Per-omega tables of the linearised model on one grid.
 *
 * The Maxwellian is renormalised against the discrete bracket,
 * M = omega g* / Z with Z = <omega g*> evaluated by grid quadrature, so that
 * <M> = 1 and <L g> = 0 hold to rounding.
 */
class MaxwellianTable {
public:
    explicit MaxwellianTable(const PhaseGrid& grid);

    std::span<const double> gstar() const { return gstar_; }
    std::span<const double> maxwellian() const { return maxwellian_; }
    std::span<const double> omega() const { return omega_; }
    double z_norm() const { return z_norm_; }

private:
    std::vector<double> omega_;
    std::vector<double> gstar_;
    std::vector<double> maxwellian_;
    double z_norm_ = 0.0;
};

// <omega g> over one (mu, omega) slice.
double omega_moment(const PhaseGrid& grid, std::span<const double> slice);

// Temperature deviation <omega g> / <omega g*> of one slice.
double delta_T(const PhaseGrid& grid, const MaxwellianTable& table, std::span<const double> slice);

// Linearised BGK operator on one slice: -omega g + M <omega g>.
void collide(const PhaseGrid& grid, const MaxwellianTable& table, std::span<const double> slice,
             std::span<double> out);
KineticField collide(const PhaseGrid& grid, const MaxwellianTable& table, const KineticField& g);

}  // namespace phonon
