#ifndef ECZ_PARALLEL_HPP
#define ECZ_PARALLEL_HPP

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ecz {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Fixed block length for parallel reductions. Partial sums are produced per
// block and combined in block order, so results are bit-identical for any
// thread count (and identical to the serial reference, which walks the same
// blocks).
inline constexpr int kReduceBlock = 512;

}  // namespace ecz

#endif
