#ifndef ECZ_STATS_HPP
#define ECZ_STATS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ecz/clustering.hpp"
#include "ecz/types.hpp"

namespace ecz {

struct RegressionModel {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
  double residual_sd = 0.0;
};

// Least squares y ~ slope*x + intercept; r2 is the squared correlation.
RegressionModel ols(const std::vector<double>& x, const std::vector<double>& y);

enum class IncomeCovariate { phi, pci };

struct ClusteredRegression {
  RegressionModel pooled;
  std::vector<RegressionModel> zones;
};

// OLS of time-averaged log10 HEC on log10 income, pooled and per zone.
ClusteredRegression clustered_regression(const Dataset& ds, const ZoneAssignment& z,
                                         IncomeCovariate covariate = IncomeCovariate::phi);

struct PCAResult {
  int T = 0;
  std::vector<double> mean;         // length T
  std::vector<double> components;   // T x T row-major; row j is the j-th component
  std::vector<double> eigenvalues;  // nonincreasing, >= 0
  std::vector<double> explained;    // eigenvalues / sum

  const double* component(int j) const {
    return components.data() + static_cast<std::size_t>(j) * T;
  }
};

// Eigen-decomposition of the sample covariance (denominator n-1). Sign
// convention: each component's largest-magnitude entry is positive.
PCAResult pca(const std::vector<double>& rows, int n, int T);
PCAResult pca(const PatternMatrix& pm);

// Coefficient of v on component j: <v - mean, e_j>.
double project(const PCAResult& p, const std::vector<double>& v, int j);

// |<e_1, 1/sqrt(T)>|; values >= kScaleShiftThreshold indicate that patterns
// differ mostly by a constant shift (a pure scale factor before the log).
inline constexpr double kScaleShiftThreshold = 0.95;
double near_constant_check(const PCAResult& p);

struct DensityCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Silverman's rule on the weighted sample:
// 0.9 * min(sd, IQR/1.34) * n_eff^(-1/5), n_eff = (sum w)^2 / sum w^2.
double silverman_bandwidth(const std::vector<double>& values,
                           const std::vector<double>& weights);

// Weighted Gaussian-kernel density estimate on an explicit grid.
DensityCurve kde(const std::vector<double>& values, const std::vector<double>& weights,
                 std::optional<double> bandwidth, const std::vector<double>& grid);

// Evaluation grid spanning [min - 4h, max + 4h].
std::vector<double> kde_grid(const std::vector<double>& values, double bandwidth,
                             int points);

struct MixtureExpert {
  double slope = 0.0;
  double intercept = 0.0;
  double noise_sd = 0.0;
  double weight = 0.0;  // mixing proportion
};

struct MixtureRegressionModel {
  std::vector<MixtureExpert> experts;
  std::vector<double> responsibilities;  // n x k row-major, rows sum to 1
  double log_likelihood = 0.0;
  int iterations = 0;
  std::vector<double> ll_trace;  // per-iteration log likelihood of the best run
};

// EM for a k-component mixture of linear regressions with input-independent
// gates; best of `restarts` runs. The log likelihood is checked to be
// nondecreasing at every iteration.
MixtureRegressionModel mixture_regression_em(const std::vector<double>& x,
                                             const std::vector<double>& y, int k,
                                             int restarts, std::uint64_t seed,
                                             int max_iter = 500);

// Published statewide econometric baseline; natural logs, coefficients fixed.
struct CECCovariates {
  double pph = 0.0;            // persons per household
  double pci = 0.0;            // per-capita income, $
  double unemp_rate = 0.0;     // percent
  double res_elec_rate = 0.0;  // cents/kWh
  double cool_days = 0.0;      // cooling degree days
  double heat_days = 0.0;      // heating degree days
  int ladwp = 0;               // service-area indicator, 0 or 1
};

double cec_model_eval(const CECCovariates& c);

}  // namespace ecz

#endif
