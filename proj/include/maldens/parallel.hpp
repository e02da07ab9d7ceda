#pragma once

// Static-chunk parallel loops. Work items write to their own output slots and
// reductions happen sequentially afterwards, so results never depend on the
// thread count.

#include <cstddef>
#include <functional>
#include <optional>

namespace maldens {

// --threads flag, else MALDENS_THREADS, else the hardware concurrency.
std::size_t resolve_threads(std::optional<std::size_t> requested);

void set_default_threads(std::size_t n);
std::size_t default_threads();

// Calls body(begin, end) on contiguous chunks of [0, n). If any chunk throws,
// the exception from the lowest-numbered failing chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace maldens
