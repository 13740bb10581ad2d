#include "phonon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonon/errors.hpp"

namespace phonon {

namespace {

// Returns n such that extent / spacing == n up to rounding, or throws.
std::size_t whole_count(double extent, double spacing, const char* what) {
    const double ratio = extent / spacing;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
        std::ostringstream msg;
        msg << what << ": extent " << extent << " is not a whole multiple of spacing " << spacing;
        throw ConfigError(msg.str());
    }
    return static_cast<std::size_t>(n);
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be strictly positive");
    }
}

}  // namespace

PhaseGrid PhaseGrid::make(const GridSpacing& s) {
    require_positive(s.x_max, "grid.x_max");
    require_positive(s.dx, "grid.dx");
    require_positive(s.t_max, "grid.t_max");
    require_positive(s.dt, "grid.dt");
    require_positive(s.dmu, "grid.dmu");
    require_positive(s.domega, "grid.domega");
    require_positive(s.omega_min, "grid.omega_min");
    if (!(s.omega_max >= s.omega_min)) {
        throw ConfigError("grid.omega_max must be >= grid.omega_min");
    }

    const std::size_t nx = whole_count(s.x_max, s.dx, "grid.dx");
    const std::size_t nmu = whole_count(2.0, s.dmu, "grid.dmu");
    if (nmu % 2 != 0) {
        // An odd count of cell-centred nodes on [-1,1] puts a node at mu = 0.
        throw ConfigError("grid.dmu: odd number of mu cells places a node at mu = 0");
    }
    const std::size_t nomega =
        s.omega_max == s.omega_min ? 1 : whole_count(s.omega_max - s.omega_min, s.domega, "grid.domega") + 1;
    const std::size_t nt = whole_count(s.t_max, s.dt, "grid.dt");

    PhaseGrid g;
    g.spacing_ = s;
    g.nt_ = nt;
    g.x_.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) g.x_[i] = (static_cast<double>(i) + 0.5) * s.dx;
    g.mu_.resize(nmu);
    for (std::size_t k = 0; k < nmu; ++k) g.mu_[k] = -1.0 + (static_cast<double>(k) + 0.5) * s.dmu;
    // Exact mirror symmetry regardless of rounding in the formula above.
    for (std::size_t k = 0; k < nmu / 2; ++k) g.mu_[nmu - 1 - k] = -g.mu_[k];
    g.omega_.resize(nomega);
    for (std::size_t m = 0; m < nomega; ++m) g.omega_[m] = s.omega_min + static_cast<double>(m) * s.domega;

    const double cfl = g.cfl();
    if (cfl > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "CFL violation: max|mu| * omega_max * dt / dx = " << cfl << " > 1";
        throw ConfigError(msg.str());
    }
    return g;
}

PhaseGrid PhaseGrid::make(const GridCounts& c) {
    if (c.nx == 0 || c.nmu == 0 || c.nomega == 0 || c.nt == 0) {
        throw ConfigError("grid counts must be positive");
    }
    GridSpacing s;
    s.x_max = c.x_max;
    s.dx = c.x_max / static_cast<double>(c.nx);
    s.t_max = c.t_max;
    s.dt = c.t_max / static_cast<double>(c.nt);
    s.dmu = 2.0 / static_cast<double>(c.nmu);
    s.omega_min = c.omega_min;
    s.omega_max = c.omega_max;
    s.domega = c.nomega > 1 ? (c.omega_max - c.omega_min) / static_cast<double>(c.nomega - 1) : 1.0;
    return make(s);
}

double PhaseGrid::cfl() const { return 1.0 * omega_max() * spacing_.dt / spacing_.dx; }

std::size_t PhaseGrid::nearest_level(double t) const {
    const double n = std::round(t / spacing_.dt);
    if (n <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(n), nt_);
}

std::size_t PhaseGrid::omega_index(double w) const {
    const double m = std::round((w - omega_min()) / spacing_.domega);
    if (m >= 0.0 && m < static_cast<double>(nomega())) {
        const auto idx = static_cast<std::size_t>(m);
        if (std::abs(omega_[idx] - w) <= 0.5 * spacing_.domega) return idx;
    }
    std::ostringstream msg;
    msg << "omega = " << w << " is outside the grid [" << omega_min() << ", " << omega_max() << "]";
    throw DomainError(msg.str());
}

double PhaseGrid::bracket_range(std::span<const double> slice, std::size_t k0, std::size_t k1) const {
    if (slice.size() != slice_size()) {
        std::ostringstream msg;
        msg << "bracket: slice has " << slice.size() << " entries, grid expects " << slice_size();
        throw StructuralError(msg.str());
    }
    const std::size_t nw = nomega();
    double sum = 0.0;
    for (std::size_t k = k0; k < k1; ++k) {
        const double* row = slice.data() + k * nw;
        for (std::size_t m = 0; m < nw; ++m) sum += row[m];
    }
    return sum * weight_mu() * weight_omega();
}

double PhaseGrid::bracket(std::span<const double> slice) const {
    return bracket_neg(slice) + bracket_pos(slice);
}

double PhaseGrid::bracket_pos(std::span<const double> slice) const {
    return bracket_range(slice, half(), nmu());
}

double PhaseGrid::bracket_neg(std::span<const double> slice) const { return bracket_range(slice, 0, half()); }

std::string PhaseGrid::describe() const {
    std::ostringstream os;
    os << "nx=" << nx() << " nmu=" << nmu() << " nomega=" << nomega() << " nt=" << nt() << " dx=" << dx()
       << " dt=" << dt() << " dmu=" << dmu() << " domega=" << domega() << " omega=[" << omega_min() << ","
       << omega_max() << "]";
    return os.str();
}

}  // namespace phonon
