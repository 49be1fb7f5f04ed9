#include "ecz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "ecz/kernels.hpp"
#include "ecz/rng.hpp"
#include "ecz/transforms.hpp"

namespace ecz {

namespace {

// Weighted least squares via the normal equations; ols() is the unit-weight
// case, and the EM M-step reuses it with responsibilities.
struct WlsFit {
  double slope = 0.0, intercept = 0.0;
  bool ok = false;
};

WlsFit weighted_ols(const std::vector<double>& x, const std::vector<double>& y,
                    const double* w) {
  const int n = static_cast<int>(x.size());
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = w ? w[i] : 1.0;
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  if (sw <= 0.0) return {};
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double wi = w ? w[i] : 1.0;
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return {};
  WlsFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = true;
  return f;
}

}  // namespace

RegressionModel ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(errc::length_mismatch, "x and y lengths differ");
  const int n = static_cast<int>(x.size());
  if (n < 3) fail(errc::too_few_rows, "regression needs n >= 3");

  const WlsFit f = weighted_ols(x, y, nullptr);
  if (!f.ok) fail(errc::degenerate_x, "x has zero variance");

  RegressionModel m;
  m.slope = f.slope;
  m.intercept = f.intercept;
  m.n = n;

  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sse = 0.0, sst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double resid = y[i] - (f.slope * x[i] + f.intercept);
    sse += resid * resid;
    sst += (y[i] - my) * (y[i] - my);
  }
  m.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  m.residual_sd = std::sqrt(sse / std::max(1, n - 2));
  return m;
}

ClusteredRegression clustered_regression(const Dataset& ds, const ZoneAssignment& z,
                                         IncomeCovariate covariate) {
  if (ds.size() != static_cast<int>(z.labels.size()))
    fail(errc::length_mismatch, "dataset vs assignment");

  std::vector<double> x(ds.size()), y(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    const double income = covariate == IncomeCovariate::phi ? rec.phi : rec.pci;
    x[i] = std::log10(income);
    const auto pattern = log_hec_pattern(rec);
    y[i] = std::accumulate(pattern.begin(), pattern.end(), 0.0) /
           static_cast<double>(pattern.size());
  }

  ClusteredRegression out;
  out.pooled = ols(x, y);
  out.zones.resize(z.k);
  for (int c = 0; c < z.k; ++c) {
    std::vector<double> xc, yc;
    for (int i = 0; i < ds.size(); ++i)
      if (z.labels[i] == c) {
        xc.push_back(x[i]);
        yc.push_back(y[i]);
      }
    if (xc.size() < 3) fail(errc::empty_zone, "zone " + std::to_string(c));
    out.zones[c] = ols(xc, yc);
  }
  return out;
}

PCAResult pca(const std::vector<double>& rows, int n, int T) {
  if (n < 2 || T < 1) fail(errc::too_few_rows, "PCA needs n >= 2 and T >= 1");

  PCAResult r;
  r.T = T;
  r.mean.resize(T);
  std::vector<double> cov(static_cast<std::size_t>(T) * T);
  kernels::mean_and_covariance(rows.data(), n, T, r.mean.data(), cov.data());

  using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const MatrixRM> C(cov.data(), T, T);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C);
  if (solver.info() != Eigen::Success) fail(errc::internal, "eigendecomposition failed");

  // Eigen returns ascending eigenvalues; store descending, rows = components.
  r.eigenvalues.resize(T);
  r.components.resize(static_cast<std::size_t>(T) * T);
  double total = 0.0;
  for (int j = 0; j < T; ++j) {
    const int src = T - 1 - j;
    r.eigenvalues[j] = std::max(0.0, solver.eigenvalues()[src]);
    total += r.eigenvalues[j];
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // Largest-magnitude entry positive.
    int arg = 0;
    for (int t = 1; t < T; ++t)
      if (std::abs(v[t]) > std::abs(v[arg])) arg = t;
    if (v[arg] < 0.0) v = -v;
    for (int t = 0; t < T; ++t) r.components[static_cast<std::size_t>(j) * T + t] = v[t];
  }
  r.explained.resize(T);
  for (int j = 0; j < T; ++j) r.explained[j] = total > 0.0 ? r.eigenvalues[j] / total : 0.0;
  return r;
}

PCAResult pca(const PatternMatrix& pm) { return pca(pm.values, pm.n, pm.T); }

double project(const PCAResult& p, const std::vector<double>& v, int j) {
  if (j < 0 || j >= p.T) fail(errc::index_out_of_range, "component " + std::to_string(j));
  if (static_cast<int>(v.size()) != p.T) fail(errc::length_mismatch, "vector length vs T");
  double acc = 0.0;
  const double* e = p.component(j);
  for (int t = 0; t < p.T; ++t) acc += (v[t] - p.mean[t]) * e[t];
  return acc;
}

double near_constant_check(const PCAResult& p) {
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(p.T));
  double acc = 0.0;
  const double* e1 = p.component(0);
  for (int t = 0; t < p.T; ++t) acc += e1[t] * inv_sqrt;
  return std::abs(acc);
}

namespace {

double weighted_quantile(std::vector<std::pair<double, double>>& sorted_vw, double q) {
  // Hazen-style interpolation on cumulative weight midpoints.
  double wsum = 0.0;
  for (const auto& [v, w] : sorted_vw) wsum += w;
  const double target = q * wsum;
  double cum = 0.0;
  double prev_mid = 0.0, prev_val = sorted_vw.front().first;
  for (std::size_t i = 0; i < sorted_vw.size(); ++i) {
    const double mid = cum + 0.5 * sorted_vw[i].second;
    if (mid >= target) {
      if (i == 0 || mid == prev_mid) return sorted_vw[i].first;
      const double f = (target - prev_mid) / (mid - prev_mid);
      return prev_val + f * (sorted_vw[i].first - prev_val);
    }
    cum += sorted_vw[i].second;
    prev_mid = mid;
    prev_val = sorted_vw[i].first;
  }
  return sorted_vw.back().first;
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& values,
                           const std::vector<double>& weights) {
  const int n = static_cast<int>(values.size());
  double wsum = 0.0, wsq = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(errc::domain_violation, "negative weight");
    wsum += w;
    wsq += w * w;
  }
  if (wsum <= 0.0) fail(errc::domain_violation, "weights sum to zero");

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += weights[i] * values[i];
  mean /= wsum;
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += weights[i] * (values[i] - mean) * (values[i] - mean);
  var /= wsum;
  const double sd = std::sqrt(var);

  std::vector<std::pair<double, double>> vw(n);
  for (int i = 0; i < n; ++i) vw[i] = {values[i], weights[i]};
  std::sort(vw.begin(), vw.end());
  const double iqr = weighted_quantile(vw, 0.75) - weighted_quantile(vw, 0.25);

  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (spread <= 0.0)
    fail(errc::degenerate_sample, "all values identical; pass an explicit bandwidth");
  const double n_eff = wsum * wsum / wsq;
  return 0.9 * spread * std::pow(n_eff, -0.2);
}

DensityCurve kde(const std::vector<double>& values, const std::vector<double>& weights,
                 std::optional<double> bandwidth, const std::vector<double>& grid) {
  if (values.size() != weights.size()) fail(errc::length_mismatch, "values vs weights");
  if (values.empty()) fail(errc::too_few_rows, "empty sample");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values, weights);
  if (h <= 0.0) fail(errc::domain_violation, "bandwidth must be positive");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) fail(errc::domain_violation, "negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) fail(errc::domain_violation, "weights sum to zero");

  DensityCurve out;
  out.bandwidth = h;
  out.x = grid;
  out.density.resize(grid.size());
  kernels::kde_evaluate(values.data(), weights.data(), static_cast<int>(values.size()), h,
                        grid.data(), static_cast<int>(grid.size()), out.density.data());
  return out;
}

std::vector<double> kde_grid(const std::vector<double>& values, double bandwidth,
                             int points) {
  if (points < 2) fail(errc::domain_violation, "grid needs >= 2 points");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 4.0 * bandwidth;
  const double hi = *hi_it + 4.0 * bandwidth;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

namespace {

constexpr double kMinNoiseSd = 1e-8;

struct EmRun {
  std::vector<MixtureExpert> experts;
  std::vector<double> resp;
  double ll = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  int iterations = 0;
  bool ok = false;
};

EmRun em_once(const std::vector<double>& x, const std::vector<double>& y, int k,
              Rng& rng, int max_iter) {
  const int n = static_cast<int>(x.size());
  EmRun run;
  run.experts.resize(k);
  run.resp.assign(static_cast<std::size_t>(n) * k, 0.0);

  // Random hard partition, then an M-step to seed the experts.
  std::vector<int> assign(n);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    assign[i] = static_cast<int>(rng.below(k));
    ++counts[assign[i]];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] < 2) return run;  // degenerate start; caller retries
  for (int i = 0; i < n; ++i) run.resp[static_cast<std::size_t>(i) * k + assign[i]] = 1.0;

  std::vector<double> w(n);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // M-step: weighted line fit, noise and gate per expert.
    for (int c = 0; c < k; ++c) {
      double rc = 0.0;
      for (int i = 0; i < n; ++i) {
        w[i] = run.resp[static_cast<std::size_t>(i) * k + c];
        rc += w[i];
      }
      const WlsFit f = weighted_ols(x, y, w.data());
      if (!f.ok || rc <= 0.0) return run;
      double sse = 0.0;
      for (int i = 0; i < n; ++i) {
        const double resid = y[i] - (f.slope * x[i] + f.intercept);
        sse += w[i] * resid * resid;
      }
      run.experts[c].slope = f.slope;
      run.experts[c].intercept = f.intercept;
      run.experts[c].noise_sd = std::sqrt(sse / rc);
      run.experts[c].weight = rc / n;
      if (run.experts[c].noise_sd < kMinNoiseSd) return run;  // collapsed component
    }

    // E-step with log-sum-exp; also accumulates the observed log likelihood.
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      double logp[64];
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const auto& e = run.experts[c];
        const double resid = (y[i] - (e.slope * x[i] + e.intercept)) / e.noise_sd;
        logp[c] = std::log(e.weight) - std::log(e.noise_sd) -
                  0.91893853320467274178 - 0.5 * resid * resid;  // log sqrt(2 pi)
        mx = std::max(mx, logp[c]);
      }
      double sum = 0.0;
      for (int c = 0; c < k; ++c) sum += std::exp(logp[c] - mx);
      const double log_px = mx + std::log(sum);
      ll += log_px;
      for (int c = 0; c < k; ++c)
        run.resp[static_cast<std::size_t>(i) * k + c] = std::exp(logp[c] - log_px);
    }

    // EM guarantees a nondecreasing likelihood; a drop means a genuine bug.
    if (ll + 1e-8 * (1.0 + std::abs(ll)) < prev_ll)
      fail(errc::internal, "EM log likelihood decreased");
    run.trace.push_back(ll);
    run.iterations = iter + 1;
    const bool converged = iter > 0 && ll - prev_ll < 1e-10 * (1.0 + std::abs(ll));
    prev_ll = ll;
    run.ll = ll;
    if (converged) break;
  }
  run.ok = true;
  return run;
}

}  // namespace

MixtureRegressionModel mixture_regression_em(const std::vector<double>& x,
                                             const std::vector<double>& y, int k,
                                             int restarts, std::uint64_t seed,
                                             int max_iter) {
  if (x.size() != y.size()) fail(errc::length_mismatch, "x vs y");
  const int n = static_cast<int>(x.size());
  if (k < 1 || k > 64) fail(errc::domain_violation, "k must be in [1, 64]");
  if (n < 3 * k) fail(errc::too_few_rows, "mixture regression needs n >= 3k");
  if (restarts < 1) fail(errc::domain_violation, "restarts must be >= 1");

  const Rng root(seed);
  EmRun best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = root.substream(r);
    EmRun run = em_once(x, y, k, rng, max_iter);
    if (run.ok && run.ll > best.ll) best = std::move(run);
  }
  if (!best.ok)
    fail(errc::degenerate_mixture, "every restart collapsed a component");

  MixtureRegressionModel m;
  m.experts = std::move(best.experts);
  m.responsibilities = std::move(best.resp);
  m.log_likelihood = best.ll;
  m.iterations = best.iterations;
  m.ll_trace = std::move(best.trace);
  return m;
}

double cec_model_eval(const CECCovariates& c) {
  if (c.pph <= 0.0 || c.pci <= 0.0 || c.cool_days <= 0.0 || c.heat_days <= 0.0)
    fail(errc::domain_violation, "logged covariates must be positive");
  if (c.ladwp != 0 && c.ladwp != 1)
    fail(errc::domain_violation, "ladwp indicator must be 0 or 1");
  return 7.1881 + 0.3935 * std::log(c.pph) + 0.1419 * std::log(c.pci) -
         0.0042 * c.unemp_rate - 0.0870 * c.res_elec_rate + 0.0323 * std::log(c.cool_days) +
         0.0181 * std::log(c.heat_days) - 0.5784 * c.ladwp;
}

}  // namespace ecz
