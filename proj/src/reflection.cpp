#include "phonon/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

ReflectionCoeff::ReflectionCoeff(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t m = 0; m < values_.size(); ++m) {
        const double v = values_[m];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            std::ostringstream msg;
            msg << "reflection coefficient entry " << m << " = " << v << " is outside [0, 1]";
            throw DomainError(msg.str());
        }
    }
}

ReflectionCoeff ReflectionCoeff::constant(const PhaseGrid& grid, double value) {
    return ReflectionCoeff(std::vector<double>(grid.nomega(), value));
}

ReflectionCoeff ReflectionCoeff::projected(std::vector<double> values) {
    for (double& v : values) {
        if (!std::isfinite(v)) throw DomainError("reflection coefficient: non-finite entry");
        v = std::clamp(v, 0.0, 1.0);
    }
    return ReflectionCoeff(std::move(values));
}

}  // namespace phonon
