#include "ecz/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "ecz/parallel.hpp"

namespace ecz::kernels {

namespace {

inline double sq_dist(const double* a, const double* b, int T) {
  double d = 0.0;
  for (int t = 0; t < T; ++t) {
    const double diff = a[t] - b[t];
    d += diff * diff;
  }
  return d;
}

void assign_nearest_impl(const double* rows, int n, int T, const double* cents, int k,
                         int* labels, double* sqdist, bool par) {
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < n; ++i) {
    const double* r = rows + static_cast<std::size_t>(i) * T;
    int best = 0;
    double best_d = sq_dist(r, cents, T);
    for (int c = 1; c < k; ++c) {
      const double d = sq_dist(r, cents + static_cast<std::size_t>(c) * T, T);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[i] = best;
    sqdist[i] = best_d;
  }
}

void label_means_impl(const double* rows, int n, int T, const int* labels, int k,
                      double* cents, int* counts, bool par) {
  const int nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(static_cast<std::size_t>(nblocks) * k * T, 0.0);
  std::vector<int> pcount(static_cast<std::size_t>(nblocks) * k, 0);

#pragma omp parallel for schedule(static) if (par)
  for (int b = 0; b < nblocks; ++b) {
    double* sums = partial.data() + static_cast<std::size_t>(b) * k * T;
    int* cnt = pcount.data() + static_cast<std::size_t>(b) * k;
    const int lo = b * kReduceBlock;
    const int hi = std::min(n, lo + kReduceBlock);
    for (int i = lo; i < hi; ++i) {
      const int c = labels[i];
      const double* r = rows + static_cast<std::size_t>(i) * T;
      double* s = sums + static_cast<std::size_t>(c) * T;
      for (int t = 0; t < T; ++t) s[t] += r[t];
      ++cnt[c];
    }
  }

  std::memset(cents, 0, static_cast<std::size_t>(k) * T * sizeof(double));
  std::memset(counts, 0, static_cast<std::size_t>(k) * sizeof(int));
  for (int b = 0; b < nblocks; ++b) {
    const double* sums = partial.data() + static_cast<std::size_t>(b) * k * T;
    const int* cnt = pcount.data() + static_cast<std::size_t>(b) * k;
    for (int c = 0; c < k; ++c) counts[c] += cnt[c];
    for (std::size_t j = 0; j < static_cast<std::size_t>(k) * T; ++j) cents[j] += sums[j];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / counts[c];
    double* s = cents + static_cast<std::size_t>(c) * T;
    for (int t = 0; t < T; ++t) s[t] *= inv;
  }
}

void pairwise_sq_dists_impl(const double* rows, int n, int T, double* out, bool par) {
#pragma omp parallel for schedule(dynamic, 16) if (par)
  for (int i = 0; i < n - 1; ++i) {
    const double* a = rows + static_cast<std::size_t>(i) * T;
    double* o = out + condensed_index(i, i + 1, n);
    for (int j = i + 1; j < n; ++j)
      o[j - i - 1] = sq_dist(a, rows + static_cast<std::size_t>(j) * T, T);
  }
}

void mean_and_covariance_impl(const double* rows, int n, int T, double* mean, double* cov,
                              bool par) {
  const int nblocks = (n + kReduceBlock - 1) / kReduceBlock;

  // Pass 1: column means, blocked.
  std::vector<double> psum(static_cast<std::size_t>(nblocks) * T, 0.0);
#pragma omp parallel for schedule(static) if (par)
  for (int b = 0; b < nblocks; ++b) {
    double* s = psum.data() + static_cast<std::size_t>(b) * T;
    const int lo = b * kReduceBlock;
    const int hi = std::min(n, lo + kReduceBlock);
    for (int i = lo; i < hi; ++i) {
      const double* r = rows + static_cast<std::size_t>(i) * T;
      for (int t = 0; t < T; ++t) s[t] += r[t];
    }
  }
  for (int t = 0; t < T; ++t) mean[t] = 0.0;
  for (int b = 0; b < nblocks; ++b) {
    const double* s = psum.data() + static_cast<std::size_t>(b) * T;
    for (int t = 0; t < T; ++t) mean[t] += s[t];
  }
  for (int t = 0; t < T; ++t) mean[t] /= n;

  // Pass 2: upper triangle of centered cross products, blocked.
  const std::size_t tt = static_cast<std::size_t>(T) * T;
  std::vector<double> pcov(static_cast<std::size_t>(nblocks) * tt, 0.0);
#pragma omp parallel for schedule(static) if (par)
  for (int b = 0; b < nblocks; ++b) {
    double* s = pcov.data() + static_cast<std::size_t>(b) * tt;
    const int lo = b * kReduceBlock;
    const int hi = std::min(n, lo + kReduceBlock);
    std::vector<double> centered(T);
    for (int i = lo; i < hi; ++i) {
      const double* r = rows + static_cast<std::size_t>(i) * T;
      for (int t = 0; t < T; ++t) centered[t] = r[t] - mean[t];
      for (int a = 0; a < T; ++a) {
        const double ca = centered[a];
        double* srow = s + static_cast<std::size_t>(a) * T;
        for (int c = a; c < T; ++c) srow[c] += ca * centered[c];
      }
    }
  }
  for (std::size_t j = 0; j < tt; ++j) cov[j] = 0.0;
  for (int b = 0; b < nblocks; ++b) {
    const double* s = pcov.data() + static_cast<std::size_t>(b) * tt;
    for (std::size_t j = 0; j < tt; ++j) cov[j] += s[j];
  }
  const double inv = 1.0 / (n - 1);
  for (int a = 0; a < T; ++a)
    for (int c = a; c < T; ++c) {
      const double v = cov[static_cast<std::size_t>(a) * T + c] * inv;
      cov[static_cast<std::size_t>(a) * T + c] = v;
      cov[static_cast<std::size_t>(c) * T + a] = v;
    }
}

inline double kernel_eval(const double* a, const double* b, int d, const KernelParams& p) {
  double sq = 0.0, dot = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    sq += diff * diff;
    dot += a[j] * b[j];
  }
  return p.theta0 * std::exp(-0.5 * p.theta1 * sq) + p.theta2 + p.theta3 * dot;
}

void kernel_matrix_impl(const double* pts, int n, int d, const KernelParams& p, double* K,
                        bool par) {
#pragma omp parallel for schedule(dynamic, 16) if (par)
  for (int i = 0; i < n; ++i) {
    const double* a = pts + static_cast<std::size_t>(i) * d;
    for (int j = i; j < n; ++j) {
      const double v = kernel_eval(a, pts + static_cast<std::size_t>(j) * d, d, p);
      K[static_cast<std::size_t>(i) * n + j] = v;
      K[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
}

void kde_evaluate_impl(const double* values, const double* weights, int n, double bandwidth,
                       const double* grid, int m, double* density, bool par) {
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) wsum += weights[i];
  const double norm = 1.0 / (wsum * bandwidth * 2.5066282746310005024);  // sqrt(2*pi)
#pragma omp parallel for schedule(static) if (par)
  for (int g = 0; g < m; ++g) {
    const double x = grid[g];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = (x - values[i]) / bandwidth;
      acc += weights[i] * std::exp(-0.5 * u * u);
    }
    density[g] = acc * norm;
  }
}

}  // namespace

std::pair<int, int> condensed_decode(std::uint64_t p, int n) {
  // Row i starts at offset i*n - i*(i+1)/2; float estimate plus exact fixup.
  const double nd = static_cast<double>(n);
  const double disc = (nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(p);
  int i = static_cast<int>(nd - 0.5 - std::sqrt(std::max(0.0, disc)));
  i = std::clamp(i, 0, n - 2);
  auto row_start = [n](int r) {
    return static_cast<std::uint64_t>(r) * n - static_cast<std::uint64_t>(r) * (r + 1) / 2;
  };
  while (i > 0 && row_start(i) > p) --i;
  while (i < n - 2 && row_start(i + 1) <= p) ++i;
  const int j = static_cast<int>(p - row_start(i)) + i + 1;
  return {i, j};
}

void assign_nearest(const double* rows, int n, int T, const double* cents, int k,
                    int* labels, double* sqdist) {
  assign_nearest_impl(rows, n, T, cents, k, labels, sqdist, true);
}
void label_means(const double* rows, int n, int T, const int* labels, int k, double* cents,
                 int* counts) {
  label_means_impl(rows, n, T, labels, k, cents, counts, true);
}
void pairwise_sq_dists(const double* rows, int n, int T, double* out) {
  pairwise_sq_dists_impl(rows, n, T, out, true);
}
void mean_and_covariance(const double* rows, int n, int T, double* mean, double* cov) {
  mean_and_covariance_impl(rows, n, T, mean, cov, true);
}
void kernel_matrix(const double* pts, int n, int d, const KernelParams& p, double* K) {
  kernel_matrix_impl(pts, n, d, p, K, true);
}
void kde_evaluate(const double* values, const double* weights, int n, double bandwidth,
                  const double* grid, int m, double* density) {
  kde_evaluate_impl(values, weights, n, bandwidth, grid, m, density, true);
}

namespace serial {
void assign_nearest(const double* rows, int n, int T, const double* cents, int k,
                    int* labels, double* sqdist) {
  assign_nearest_impl(rows, n, T, cents, k, labels, sqdist, false);
}
void label_means(const double* rows, int n, int T, const int* labels, int k, double* cents,
                 int* counts) {
  label_means_impl(rows, n, T, labels, k, cents, counts, false);
}
void pairwise_sq_dists(const double* rows, int n, int T, double* out) {
  pairwise_sq_dists_impl(rows, n, T, out, false);
}
void mean_and_covariance(const double* rows, int n, int T, double* mean, double* cov) {
  mean_and_covariance_impl(rows, n, T, mean, cov, false);
}
void kernel_matrix(const double* pts, int n, int d, const KernelParams& p, double* K) {
  kernel_matrix_impl(pts, n, d, p, K, false);
}
void kde_evaluate(const double* values, const double* weights, int n, double bandwidth,
                  const double* grid, int m, double* density) {
  kde_evaluate_impl(values, weights, n, bandwidth, grid, m, density, false);
}
}  // namespace serial

}  // namespace ecz::kernels
