#ifndef ECZ_GP_HPP
#define ECZ_GP_HPP

#include <cstdint>
#include <vector>

#include "ecz/clustering.hpp"
#include "ecz/types.hpp"

namespace ecz {

// k(x, x') = theta0 * exp(-0.5 * theta1 * |x - x'|^2) + theta2 + theta3 * <x, x'>
double kernel(const double* x, const double* x2, int d, const KernelParams& p);
double kernel(double x, double x2, const KernelParams& p);

// Candidate values per parameter; the search evaluates the full cross
// product, then refines the winner by coordinate descent.
struct GridSpec {
  std::vector<double> theta0{0.1, 1.0, 10.0};
  std::vector<double> theta1{0.1, 1.0, 10.0};
  std::vector<double> theta2{0.0, 1.0};
  std::vector<double> theta3{0.0, 1.0};
  std::vector<double> sigma_n2{1e-4, 1e-2, 1e-1};
};

struct GPModel {
  KernelParams params;
  int dim = 0;
  std::vector<double> x_mean, x_scale;  // per-dimension input standardization
  std::vector<double> train_x;          // standardized inputs, n x dim
  std::vector<double> train_y;          // raw targets
  double y_mean = 0.0;                  // constant mean function
  std::vector<double> chol;             // lower factor L of K + sigma_n2*I (+ jitter)
  std::vector<double> alpha;            // (K + sigma_n2*I)^{-1} (y - y_mean)
  double jitter = 0.0;                  // diagonal jitter actually applied
  double log_marginal = 0.0;

  int n() const { return static_cast<int>(train_y.size()); }
};

struct Prediction {
  double mean = 0.0;
  double std_err = 0.0;
};

// Maximizes the log marginal likelihood over the grid, then refines by
// coordinate descent (three sweeps with multiplicative steps 2, 1.25, 1.06).
// Deterministic; ties resolve to the earliest grid point.
GPModel fit_gp(const std::vector<double>& x, int dim, const std::vector<double>& y,
               const GridSpec& grid = {}, std::uint64_t seed = 0);

// Builds the model at fixed kernel parameters (no search).
GPModel fit_gp_fixed(const std::vector<double>& x, int dim, const std::vector<double>& y,
                     const KernelParams& params);

// Log marginal likelihood of centered targets under the factored kernel:
// -1/2 (y-m)' (K+s2 I)^{-1} (y-m) - 1/2 log|K+s2 I| - n/2 log(2 pi).
double log_marginal_likelihood(const GPModel& m);

std::vector<Prediction> predict(const GPModel& m, const std::vector<double>& xs);
Prediction predict_one(const GPModel& m, const double* x);

// d(mean)/dx at a query point, in raw (unstandardized) input units.
std::vector<double> predict_mean_grad(const GPModel& m, const double* x);

struct GPCurvePoint {
  double x = 0.0;  // log10 household income
  double mean = 0.0;
  double lo = 0.0;  // mean - 2 std_err
  double hi = 0.0;  // mean + 2 std_err
};

struct ZoneGPRegression {
  int zone = 0;
  GPModel model;
  std::vector<GPCurvePoint> curve;
};

// Per-zone GP regression of time-averaged log10 HEC on log10 PHI, with a
// prediction curve and +/- 2 standard error band over the zone's income
// range. Every zone needs at least 5 members.
std::vector<ZoneGPRegression> clustered_gp_regression(const Dataset& ds,
                                                      const ZoneAssignment& z,
                                                      const GridSpec& grid = {},
                                                      int curve_points = 100);

}  // namespace ecz

#endif
