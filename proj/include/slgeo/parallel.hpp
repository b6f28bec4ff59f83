#pragma once

// Index-parallel loops.  Each index writes only its own output slot, so the
// results do not depend on the number of threads.

#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace slgeo {

/// Threads used by parallel_for.  0 restores the default: the SLGEO_THREADS
/// environment variable when set, otherwise all hardware threads.
void set_thread_count(int n);
int thread_count();

template <class F>
void parallel_for(std::size_t n, F&& f) {
  const int threads = thread_count();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  tbb::task_arena arena(threads);
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const auto& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
    });
  });
}

}  // namespace slgeo
