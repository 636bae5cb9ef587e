#pragma once

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sigfilter {

// All Monte Carlo kernels run in one of two modes with bit-identical results:
// the parallel mode distributes fixed-size blocks over OpenMP threads, the
// serial mode walks the same blocks in order. Each block owns a random stream
// derived from (seed, block index) and writes to its own slot, so the
// partitioning -- not the worker count -- determines the output.
enum class ExecPolicy { serial, parallel };

inline int max_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_workers(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline std::int64_t block_count(std::int64_t n_items, std::int64_t block_size) {
  return (n_items + block_size - 1) / block_size;
}

// fn(block_index, begin, end) over [0, n_items) in blocks of block_size.
template <class Fn>
void for_each_block(std::int64_t n_items, std::int64_t block_size, ExecPolicy policy, Fn&& fn) {
  const std::int64_t blocks = block_count(n_items, block_size);
  if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t b = 0; b < blocks; ++b) {
      fn(b, b * block_size, std::min(n_items, (b + 1) * block_size));
    }
  } else {
    for (std::int64_t b = 0; b < blocks; ++b) {
      fn(b, b * block_size, std::min(n_items, (b + 1) * block_size));
    }
  }
}

}  // namespace sigfilter
