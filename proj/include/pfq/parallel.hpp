#pragma once

#include <cstddef>
#include <functional>

namespace pfq {

// Worker count used by parallel_for; 1 by default. Results never depend on it because
// every task derives its own RNG stream from its index.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n), split into contiguous blocks across threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pfq
