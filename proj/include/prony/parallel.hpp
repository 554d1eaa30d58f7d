#ifndef PRONY_PARALLEL_HPP
#define PRONY_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#include "prony/rng.hpp"

namespace prony {

/// Runs body(i) for i in [0, n). The parallel branch uses a static OpenMP
/// schedule; the body must write only to slot i of preallocated output so
/// that the result does not depend on the thread count. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace prony

#endif  // PRONY_PARALLEL_HPP
