#pragma once

#include <cstddef>
#include <functional>

namespace phonon {

// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace phonon
