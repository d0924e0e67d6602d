#ifndef FENE_PARALLEL_HPP
#define FENE_PARALLEL_HPP

#include <cstdint>
#include <span>
#include <type_traits>

namespace fene {

/// Number of worker threads the parallel kernels may use.
int worker_count();

/// Overrides the worker count; n <= 0 restores the runtime default.
/// worker_count() == 1 selects the serial code path everywhere.
void set_worker_count(int n);

namespace detail {
void parallel_for_impl(std::int64_t n, void* ctx,
                       void (*body)(void*, std::int64_t, std::int64_t));
constexpr std::int64_t kReduceChunks = 64;
}  // namespace detail

/// Runs body over a partition of [0, n); body is either body(i) per index
/// or body(begin, end) per range. Intended for loops whose iterations
/// write disjoint outputs; for sums use parallel_reduce, whose chunking
/// is a fixed function of n alone.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
  auto thunk = [](void* ctx, std::int64_t b, std::int64_t e) {
    auto& f = *static_cast<std::remove_reference_t<F>*>(ctx);
    if constexpr (std::is_invocable_v<F&, std::int64_t, std::int64_t>) {
      f(b, e);
    } else {
      for (std::int64_t i = b; i < e; ++i) f(i);
    }
  };
  detail::parallel_for_impl(n, &body, thunk);
}

/// Sum of partial(begin, end) over the fixed 64-chunk partition of [0, n),
/// accumulated in chunk order. Deterministic for any worker count.
template <class F>
double parallel_reduce(std::int64_t n, F&& partial) {
  if (n <= 0) return 0.0;
  const std::int64_t chunks =
      n < detail::kReduceChunks ? n : detail::kReduceChunks;
  double part[detail::kReduceChunks];
  auto body = [&](std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      const std::int64_t b = n * c / chunks;
      const std::int64_t e = n * (c + 1) / chunks;
      part[c] = partial(b, e);
    }
  };
  parallel_for(chunks, body);
  double sum = 0.0;
  for (std::int64_t c = 0; c < chunks; ++c) sum += part[c];
  return sum;
}

/// Sum of a plain array in the same fixed chunk order.
double deterministic_sum(std::span<const double> values);

}  // namespace fene

#endif
