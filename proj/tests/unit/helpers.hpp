#pragma once

#include "phonon/grid.hpp"

namespace test {

// A few hundred cells and 50 steps: sub-millisecond solves.
inline phonon::PhaseGrid tiny_grid() { return phonon::PhaseGrid::make(phonon::GridCounts{0.5, 1.0, 0.1, 2.0, 5, 8, 10, 50}); }

inline phonon::PhaseGrid coarse_grid() {
    return phonon::PhaseGrid::make(phonon::GridCounts{0.5, 5.0, 0.1, 2.0, 10, 20, 20, 250});
}

}  // namespace test
