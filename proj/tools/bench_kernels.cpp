// Throughput comparison of the OpenMP kernels against their serial reference
// twins. Usage: ecz-bench [n] [T] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "ecz/kernels.hpp"
#include "ecz/parallel.hpp"
#include "ecz/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4000;
  const int T = argc > 2 ? std::atoi(argv[2]) : 72;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;
  const int k = 6;

  ecz::Rng rng(7);
  std::vector<double> rows(static_cast<std::size_t>(n) * T);
  for (double& v : rows) v = rng.normal();
  std::vector<double> cents(static_cast<std::size_t>(k) * T);
  for (double& v : cents) v = rng.normal();

  std::printf("n=%d T=%d k=%d threads=%d\n", n, T, k, ecz::max_threads());
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    std::vector<int> labels(n);
    std::vector<double> sqd(n);
    const double s = time_ms(
        [&] {
          ecz::kernels::serial::assign_nearest(rows.data(), n, T, cents.data(), k,
                                               labels.data(), sqd.data());
        },
        repeats);
    const double p = time_ms(
        [&] {
          ecz::kernels::assign_nearest(rows.data(), n, T, cents.data(), k, labels.data(),
                                       sqd.data());
        },
        repeats);
    row("assign_nearest", s, p);

    std::vector<double> means(static_cast<std::size_t>(k) * T);
    std::vector<int> counts(k);
    const double s2 = time_ms(
        [&] {
          ecz::kernels::serial::label_means(rows.data(), n, T, labels.data(), k,
                                            means.data(), counts.data());
        },
        repeats);
    const double p2 = time_ms(
        [&] {
          ecz::kernels::label_means(rows.data(), n, T, labels.data(), k, means.data(),
                                    counts.data());
        },
        repeats);
    row("label_means", s2, p2);
  }

  {
    const int np = std::min(n, 1500);  // condensed matrix is O(np^2)
    std::vector<double> dists(static_cast<std::size_t>(np) * (np - 1) / 2);
    const double s = time_ms(
        [&] { ecz::kernels::serial::pairwise_sq_dists(rows.data(), np, T, dists.data()); },
        repeats);
    const double p = time_ms(
        [&] { ecz::kernels::pairwise_sq_dists(rows.data(), np, T, dists.data()); }, repeats);
    row("pairwise_sq_dists", s, p);
  }

  {
    std::vector<double> mean(T), cov(static_cast<std::size_t>(T) * T);
    const double s = time_ms(
        [&] {
          ecz::kernels::serial::mean_and_covariance(rows.data(), n, T, mean.data(),
                                                    cov.data());
        },
        repeats);
    const double p = time_ms(
        [&] { ecz::kernels::mean_and_covariance(rows.data(), n, T, mean.data(), cov.data()); },
        repeats);
    row("mean_and_covariance", s, p);
  }

  {
    const int np = std::min(n, 1200);
    ecz::KernelParams params{1.0, 2.0, 0.1, 0.0, 0.0};
    std::vector<double> K(static_cast<std::size_t>(np) * np);
    const double s = time_ms(
        [&] { ecz::kernels::serial::kernel_matrix(rows.data(), np, 2, params, K.data()); },
        repeats);
    const double p = time_ms(
        [&] { ecz::kernels::kernel_matrix(rows.data(), np, 2, params, K.data()); }, repeats);
    row("kernel_matrix", s, p);
  }

  {
    std::vector<double> values(n), weights(n, 1.0), grid(512), density(512);
    for (int i = 0; i < n; ++i) values[i] = rows[i];
    for (int g = 0; g < 512; ++g) grid[g] = -4.0 + 8.0 * g / 511.0;
    const double s = time_ms(
        [&] {
          ecz::kernels::serial::kde_evaluate(values.data(), weights.data(), n, 0.1,
                                             grid.data(), 512, density.data());
        },
        repeats);
    const double p = time_ms(
        [&] {
          ecz::kernels::kde_evaluate(values.data(), weights.data(), n, 0.1, grid.data(), 512,
                                     density.data());
        },
        repeats);
    row("kde_evaluate", s, p);
  }

  return 0;
}
