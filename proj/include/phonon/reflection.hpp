#pragma once

#include <span>
#include <vector>

#include "phonon/grid.hpp"

namespace phonon {

// Frequency-resolved reflection coefficient eta(omega_m), every entry in [0, 1].
class ReflectionCoeff {
public:
    ReflectionCoeff() = default;
    // Throws DomainError when an entry is outside [0, 1] or not finite.
    explicit ReflectionCoeff(std::vector<double> values);

    static ReflectionCoeff constant(const PhaseGrid& grid, double value);
    // Componentwise clamp onto [0, 1]; non-finite entries are rejected.
    static ReflectionCoeff projected(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t m) const { return values_[m]; }
    std::span<const double> values() const { return values_; }
    bool operator==(const ReflectionCoeff&) const = default;

private:
    std::vector<double> values_;
};

}  // namespace phonon
