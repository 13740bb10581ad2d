#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace phonon {

// Extents and spacings of the (x, mu, omega, t) lattice.
struct GridSpacing {
    double x_max = 0.5;
    double dx = 0.02;
    double t_max = 5.0;
    double dt = 0.01;
    double dmu = 0.01;
    double omega_min = 0.05;
    double omega_max = 2.0;
    double domega = 0.05;

    bool operator==(const GridSpacing&) const = default;
};

// Alternative description by node counts. omega nodes are
// omega_min, omega_min + domega, ..., omega_max (inclusive).
struct GridCounts {
    double x_max = 0.5;
    double t_max = 5.0;
    double omega_min = 0.1;
    double omega_max = 2.0;
    std::size_t nx = 10;
    std::size_t nmu = 20;
    std::size_t nomega = 20;
    std::size_t nt = 250;
    bool operator==(const GridCounts&) const = default;
};

/**
 * Uniform phase-space/time lattice with midpoint quadrature.
 *
 * x nodes are cell centers (i + 1/2) dx on [0, x_max]; the left face is the
 * illuminated surface and the right face is the reflective interface.
 * mu nodes are cell centers -1 + (k + 1/2) dmu, so 0 is never a node and
 * mu_k = -mu_{nmu-1-k}. omega nodes are vertex nodes from omega_min to
 * omega_max. Time levels are t_n = n dt, n = 0..nt.
 *
 * Every bracket <f> = sum_k sum_m f(mu_k, omega_m) dmu domega is computed
 * here so all modules agree on the quadrature.
 */
class PhaseGrid {
public:
    static PhaseGrid make(const GridSpacing& spacing);
    static PhaseGrid make(const GridCounts& counts);

    std::size_t nx() const { return x_.size(); }
    std::size_t nmu() const { return mu_.size(); }
    std::size_t nomega() const { return omega_.size(); }
    // Number of time steps; there are nt() + 1 time levels.
    std::size_t nt() const { return nt_; }
    std::size_t n_levels() const { return nt_ + 1; }

    double dx() const { return spacing_.dx; }
    double dt() const { return spacing_.dt; }
    double dmu() const { return spacing_.dmu; }
    double domega() const { return spacing_.domega; }
    double x_max() const { return spacing_.x_max; }
    double t_max() const { return spacing_.t_max; }
    double omega_min() const { return omega_.front(); }
    double omega_max() const { return omega_.back(); }
    const GridSpacing& spacing() const { return spacing_; }

    std::span<const double> x_nodes() const { return x_; }
    std::span<const double> mu_nodes() const { return mu_; }
    std::span<const double> omega_nodes() const { return omega_; }
    double x(std::size_t i) const { return x_[i]; }
    double mu(std::size_t k) const { return mu_[k]; }
    double omega(std::size_t m) const { return omega_[m]; }
    double t(std::size_t n) const { return static_cast<double>(n) * spacing_.dt; }

    double weight_mu() const { return spacing_.dmu; }
    double weight_omega() const { return spacing_.domega; }

    // Index of -mu_k.
    std::size_t mirror(std::size_t k) const { return nmu() - 1 - k; }
    // First index with mu > 0; indices [0, half) have mu < 0.
    std::size_t half() const { return nmu() / 2; }
    bool is_positive(std::size_t k) const { return k >= half(); }

    // Size of one velocity slice (mu, omega) and of a full field (x, mu, omega).
    std::size_t slice_size() const { return nmu() * nomega(); }
    std::size_t field_size() const { return nx() * slice_size(); }

    // max|mu| * omega_max * dt / dx with the |mu| <= 1 bound.
    double cfl() const;

    // Nearest time level to t (clamped to [0, nt]).
    std::size_t nearest_level(double t) const;
    // Index of the omega node equal to omega within half a spacing, or throws.
    std::size_t omega_index(double omega) const;

    // Quadrature over a (mu, omega) slice laid out as [k * nomega + m].
    double bracket(std::span<const double> slice) const;
    double bracket_pos(std::span<const double> slice) const;
    double bracket_neg(std::span<const double> slice) const;

    std::string describe() const;

private:
    PhaseGrid() = default;
    double bracket_range(std::span<const double> slice, std::size_t k0, std::size_t k1) const;

    GridSpacing spacing_;
    std::size_t nt_ = 0;
    std::vector<double> x_;
    std::vector<double> mu_;
    std::vector<double> omega_;
};

}  // namespace phonon
