#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phonon/grid.hpp"

namespace phonon {

// Scalar field g(x, mu, omega) at one time level, laid out [(i * nmu + k) * nomega + m].
class KineticField {
public:
    KineticField() = default;
    explicit KineticField(const PhaseGrid& grid, double fill = 0.0)
        : nx_(grid.nx()), nmu_(grid.nmu()), nomega_(grid.nomega()), values_(grid.field_size(), fill) {}

    std::size_t nx() const { return nx_; }
    std::size_t nmu() const { return nmu_; }
    std::size_t nomega() const { return nomega_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t i, std::size_t k, std::size_t m) { return values_[(i * nmu_ + k) * nomega_ + m]; }
    double operator()(std::size_t i, std::size_t k, std::size_t m) const {
        return values_[(i * nmu_ + k) * nomega_ + m];
    }

    std::span<double> slice(std::size_t i) { return {values_.data() + i * nmu_ * nomega_, nmu_ * nomega_}; }
    std::span<const double> slice(std::size_t i) const {
        return {values_.data() + i * nmu_ * nomega_, nmu_ * nomega_};
    }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool matches(const PhaseGrid& grid) const {
        return nx_ == grid.nx() && nmu_ == grid.nmu() && nomega_ == grid.nomega();
    }

    double sup_norm() const;
    double min_value() const;
    bool all_finite() const;

    // Broadcast a per-omega profile over x and mu.
    static KineticField broadcast(const PhaseGrid& grid, std::span<const double> per_omega);

private:
    std::size_t nx_ = 0;
    std::size_t nmu_ = 0;
    std::size_t nomega_ = 0;
    std::vector<double> values_;
};

// Integrate a field over omega (with weight domega): result is nx * nmu, row-major in x.
std::vector<double> integrate_omega(const PhaseGrid& grid, const KineticField& g);
// Integrate a field over mu (with weight dmu): result is nx * nomega, row-major in x.
std::vector<double> integrate_mu(const PhaseGrid& grid, const KineticField& g);

}  // namespace phonon
