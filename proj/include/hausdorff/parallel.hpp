#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace hausdorff {

/// Runs body(i) for i in [0, count), in parallel when OpenMP is available.
/// The first exception thrown by any iteration is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(hausdorff_parallel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Evaluates f(i) for every index into a vector. Reductions over the result are
/// done by the caller in index order, which keeps them deterministic.
template <class F>
std::vector<double> parallel_map(std::size_t count, F&& f) {
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace hausdorff
