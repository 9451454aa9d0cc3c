#pragma once

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace brw {

/// Runs body(i) for i in [0, n). Iterations must be independent and write
/// only to per-index slots; with that contract the result is identical for
/// the serial and the OpenMP path, whatever the thread count.
template <class F>
void parallel_for_index(long n, F&& body, bool parallel = true) {
  std::exception_ptr err = nullptr;
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)parallel;
#endif
  for (long i = 0; i < n; ++i) body(i);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace brw
