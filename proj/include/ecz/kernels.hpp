#ifndef ECZ_KERNELS_HPP
#define ECZ_KERNELS_HPP

#include <cstdint>
#include <utility>

#include "ecz/types.hpp"

// Data-parallel inner loops shared by the clustering, geostats, gp and stats
// modules. Each kernel is OpenMP-parallel by default and has a serial
// reference twin under kernels::serial that walks the exact same code path,
// so outputs are bit-identical between the two and for any thread count.
// tools/ecz-bench compares their throughput.
namespace ecz::kernels {

// labels[i] = argmin_c |row_i - cent_c|^2 (ties to the lowest index),
// sqdist[i] = the minimum squared distance.
void assign_nearest(const double* rows, int n, int T, const double* cents, int k,
                    int* labels, double* sqdist);

// Mean of member rows per label. cents is k*T, counts is k; labels must lie
// in [0, k). Empty labels leave a zero row. Accumulation is blocked in fixed
// row order (kReduceBlock), independent of thread count.
void label_means(const double* rows, int n, int T, const int* labels, int k,
                 double* cents, int* counts);

// Condensed upper triangle of pairwise squared Euclidean distances:
// out[condensed_index(i, j, n)] = |row_i - row_j|^2 for i < j.
void pairwise_sq_dists(const double* rows, int n, int T, double* out);

inline std::size_t condensed_index(int i, int j, int n) {
  return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
         (j - i - 1);
}

// Inverse of condensed_index: pair (i, j) with i < j < n for a condensed
// offset p.
std::pair<int, int> condensed_decode(std::uint64_t p, int n);

// Column means and T x T sample covariance (denominator n-1) of n rows.
void mean_and_covariance(const double* rows, int n, int T, double* mean, double* cov);

// Symmetric Gram matrix K[i*n+j] = k(p_i, p_j) for row-major points (n x d);
// sigma_n2 is not added here.
void kernel_matrix(const double* pts, int n, int d, const KernelParams& p, double* K);

// Weighted Gaussian kernel density evaluated at m grid points.
void kde_evaluate(const double* values, const double* weights, int n, double bandwidth,
                  const double* grid, int m, double* density);

namespace serial {
void assign_nearest(const double* rows, int n, int T, const double* cents, int k,
                    int* labels, double* sqdist);
void label_means(const double* rows, int n, int T, const int* labels, int k,
                 double* cents, int* counts);
void pairwise_sq_dists(const double* rows, int n, int T, double* out);
void mean_and_covariance(const double* rows, int n, int T, double* mean, double* cov);
void kernel_matrix(const double* pts, int n, int d, const KernelParams& p, double* K);
void kde_evaluate(const double* values, const double* weights, int n, double bandwidth,
                  const double* grid, int m, double* density);
}  // namespace serial

}  // namespace ecz::kernels

#endif
