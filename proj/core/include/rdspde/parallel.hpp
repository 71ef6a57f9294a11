#pragma once

#include <cstddef>
#include <functional>

namespace rdspde {

/// Worker count from RDSPDE_WORKERS, else the hardware concurrency (min 1).
int default_workers();

/// Calls body(i) for every i in [0, count), spread over up to `workers`
/// threads in contiguous blocks. Callers write results into pre-sized
/// storage indexed by i, so any reduction afterwards is order-stable.
/// The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace rdspde
