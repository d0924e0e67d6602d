#include "fene/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fene {

namespace {
std::atomic<int> g_worker_override{0};
}

int worker_count() {
  const int n = g_worker_override.load(std::memory_order_relaxed);
  if (n > 0) return n;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) {
  g_worker_override.store(n > 0 ? n : 0, std::memory_order_relaxed);
}

namespace detail {

void parallel_for_impl(std::int64_t n, void* ctx,
                       void (*body)(void*, std::int64_t, std::int64_t)) {
  if (n <= 0) return;
  const int nw = worker_count();
  if (nw <= 1) {
    body(ctx, 0, n);
    return;
  }
#ifdef _OPENMP
  const std::int64_t grains = n < 4 * nw ? n : 4 * nw;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nw)
  for (std::int64_t g = 0; g < grains; ++g) {
    body(ctx, n * g / grains, n * (g + 1) / grains);
  }
#else
  body(ctx, 0, n);
#endif
}

}  // namespace detail

double deterministic_sum(std::span<const double> values) {
  const double* p = values.data();
  return parallel_reduce(static_cast<std::int64_t>(values.size()),
                         [p](std::int64_t b, std::int64_t e) {
                           double s = 0.0;
                           for (std::int64_t i = b; i < e; ++i) s += p[i];
                           return s;
                         });
}

}  // namespace fene
