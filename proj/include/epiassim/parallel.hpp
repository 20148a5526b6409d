#pragma once

#include <cstddef>
#include <functional>

namespace epiassim {

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 or 1 runs inline).
/// If several indices throw, the exception from the lowest index is rethrown,
/// so failures are reported the same way for every worker count.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace epiassim
