#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

namespace ski::detail {

// OpenMP loop over [0, n) that rethrows the first exception raised by a
// body on the calling thread. Exceptions may not cross an OpenMP region.
template <class Body>
void parallel_for(std::int64_t n, Body&& body, bool dynamic = false) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto guarded = [&](std::int64_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) guarded(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) guarded(i);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ski::detail
