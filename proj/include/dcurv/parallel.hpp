#pragma once

#include <cstddef>
#include <functional>

namespace dcurv {

/// Worker count used by parallel_for. Defaults to 1; the CLI's --threads sets it.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index are independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dcurv
