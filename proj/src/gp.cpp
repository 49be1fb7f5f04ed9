#include "ecz/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ecz/kernels.hpp"
#include "ecz/transforms.hpp"

namespace ecz {

namespace {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::VectorXd;

constexpr double kLog2Pi = 1.8378770664093454836;

// Lower-triangular factor of K + sigma_n2*I with escalating diagonal jitter:
// starts at 1e-10 * trace(K)/n and grows by 10x up to 1e-4 * trace(K)/n.
// Returns the jitter applied; negative when factorization never succeeded.
double cholesky_with_jitter(const MatrixRM& K, double sigma_n2, MatrixRM& L) {
  const int n = static_cast<int>(K.rows());
  const double scale = K.trace() / n;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 7; ++attempt) {
    MatrixRM A = K;
    A.diagonal().array() += sigma_n2 + jitter;
    Eigen::LLT<MatrixRM> llt(A);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
      return jitter;
    }
    jitter = (jitter == 0.0) ? 1e-10 * scale : jitter * 10.0;
    if (jitter > 1e-4 * scale) break;
  }
  return -1.0;
}

struct Factored {
  MatrixRM L;
  VectorXd alpha;
  double jitter = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

Factored factor_and_score(const MatrixRM& K, const VectorXd& yc, double sigma_n2) {
  Factored f;
  f.jitter = cholesky_with_jitter(K, sigma_n2, f.L);
  if (f.jitter < 0.0) return f;
  const int n = static_cast<int>(K.rows());
  f.alpha = f.L.triangularView<Eigen::Lower>().solve(yc);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(f.L(i, i));
  f.lml = -0.5 * f.alpha.squaredNorm() - logdet - 0.5 * n * kLog2Pi;
  f.alpha = f.L.transpose().triangularView<Eigen::Upper>().solve(f.alpha);
  f.ok = true;
  return f;
}

MatrixRM gram(const std::vector<double>& xs, int n, int d, const KernelParams& p) {
  MatrixRM K(n, n);
  kernels::kernel_matrix(xs.data(), n, d, p, K.data());
  return K;
}

double score_params(const std::vector<double>& xs, int n, int d, const VectorXd& yc,
                    const KernelParams& p) {
  const Factored f = factor_and_score(gram(xs, n, d, p), yc, p.sigma_n2);
  return f.ok ? f.lml : -std::numeric_limits<double>::infinity();
}

// Fills dim, x_mean/x_scale, standardized train_x, train_y and y_mean.
void standardize_into(GPModel& m, const std::vector<double>& x, int dim,
                      const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  if (n < 2) fail(errc::too_few_rows, "GP fit needs n >= 2");
  if (static_cast<int>(x.size()) != n * dim)
    fail(errc::length_mismatch, "inputs do not match targets");
  for (double v : x)
    if (!std::isfinite(v)) fail(errc::domain_violation, "non-finite GP input");

  m.dim = dim;
  m.train_y = y;
  m.y_mean = 0.0;
  for (double v : y) m.y_mean += v;
  m.y_mean /= n;

  m.x_mean.assign(dim, 0.0);
  m.x_scale.assign(dim, 1.0);
  for (int j = 0; j < dim; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[static_cast<std::size_t>(i) * dim + j];
    m.x_mean[j] = s / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dv = x[static_cast<std::size_t>(i) * dim + j] - m.x_mean[j];
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / (n - 1));
    if (sd > 0.0) m.x_scale[j] = sd;  // constant dimensions keep scale 1
  }
  m.train_x.resize(x.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j)
      m.train_x[static_cast<std::size_t>(i) * dim + j] =
          (x[static_cast<std::size_t>(i) * dim + j] - m.x_mean[j]) / m.x_scale[j];
}

}  // namespace

double kernel(const double* x, const double* x2, int d, const KernelParams& p) {
  double sq = 0.0, dot = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = x[j] - x2[j];
    sq += diff * diff;
    dot += x[j] * x2[j];
  }
  return p.theta0 * std::exp(-0.5 * p.theta1 * sq) + p.theta2 + p.theta3 * dot;
}

double kernel(double x, double x2, const KernelParams& p) { return kernel(&x, &x2, 1, p); }

GPModel fit_gp_fixed(const std::vector<double>& x, int dim, const std::vector<double>& y,
                     const KernelParams& params) {
  params.check();
  GPModel m;
  m.params = params;
  standardize_into(m, x, dim, y);
  const int n = m.n();

  VectorXd yc(n);
  for (int i = 0; i < n; ++i) yc[i] = y[i] - m.y_mean;

  const Factored f = factor_and_score(gram(m.train_x, n, dim, params), yc, params.sigma_n2);
  if (!f.ok)
    fail(errc::singular_kernel, "kernel matrix not positive definite after jitter escalation");
  m.chol.assign(f.L.data(), f.L.data() + static_cast<std::size_t>(n) * n);
  m.alpha.assign(f.alpha.data(), f.alpha.data() + n);
  m.jitter = f.jitter;
  m.log_marginal = f.lml;
  return m;
}

GPModel fit_gp(const std::vector<double>& x, int dim, const std::vector<double>& y,
               const GridSpec& grid, std::uint64_t seed) {
  (void)seed;  // the search is deterministic; kept for interface stability
  const int n = static_cast<int>(y.size());

  // Standardize once up front so every grid candidate sees the same inputs.
  GPModel proto;
  standardize_into(proto, x, dim, y);
  VectorXd yc(n);
  for (int i = 0; i < n; ++i) yc[i] = y[i] - proto.y_mean;

  std::vector<KernelParams> candidates;
  for (double t0 : grid.theta0)
    for (double t1 : grid.theta1)
      for (double t2 : grid.theta2)
        for (double t3 : grid.theta3)
          for (double s2 : grid.sigma_n2) {
            if (t0 == 0.0 && t2 == 0.0 && t3 == 0.0) continue;
            candidates.push_back({t0, t1, t2, t3, s2});
          }
  if (candidates.empty()) fail(errc::config_error, "empty hyperparameter grid");

  std::vector<double> scores(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(candidates.size()); ++c)
    scores[c] = score_params(proto.train_x, n, dim, yc, candidates[c]);

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  if (!std::isfinite(scores[best]))
    fail(errc::singular_kernel, "no grid point produced a positive definite kernel");

  KernelParams p = candidates[best];
  double best_score = scores[best];

  // Coordinate descent around the grid winner. Parameters currently at zero
  // stay off; everything else moves multiplicatively while the likelihood
  // improves.
  const double steps[3] = {2.0, 1.25, 1.06};
  for (double step : steps) {
    for (int param = 0; param < 5; ++param) {
      auto get = [&](const KernelParams& q) {
        switch (param) {
          case 0: return q.theta0;
          case 1: return q.theta1;
          case 2: return q.theta2;
          case 3: return q.theta3;
          default: return q.sigma_n2;
        }
      };
      auto with = [&](KernelParams q, double v) {
        switch (param) {
          case 0: q.theta0 = v; break;
          case 1: q.theta1 = v; break;
          case 2: q.theta2 = v; break;
          case 3: q.theta3 = v; break;
          default: q.sigma_n2 = v; break;
        }
        return q;
      };
      if (get(p) == 0.0) continue;
      bool improved = true;
      while (improved) {
        improved = false;
        for (double factor : {step, 1.0 / step}) {
          const KernelParams q = with(p, get(p) * factor);
          const double s = score_params(proto.train_x, n, dim, yc, q);
          if (s > best_score) {
            best_score = s;
            p = q;
            improved = true;
            break;
          }
        }
      }
    }
  }

  return fit_gp_fixed(x, dim, y, p);
}

double log_marginal_likelihood(const GPModel& m) { return m.log_marginal; }

Prediction predict_one(const GPModel& m, const double* x) {
  const int n = m.n(), d = m.dim;
  std::vector<double> xs(d);
  for (int j = 0; j < d; ++j) xs[j] = (x[j] - m.x_mean[j]) / m.x_scale[j];

  VectorXd kv(n);
  for (int i = 0; i < n; ++i)
    kv[i] = kernel(xs.data(), m.train_x.data() + static_cast<std::size_t>(i) * d, d,
                   m.params);

  Prediction out;
  double mean = m.y_mean;
  for (int i = 0; i < n; ++i) mean += kv[i] * m.alpha[i];
  out.mean = mean;

  Eigen::Map<const MatrixRM> L(m.chol.data(), n, n);
  const VectorXd v = L.triangularView<Eigen::Lower>().solve(kv);
  const double prior = kernel(xs.data(), xs.data(), d, m.params);
  const double var = std::max(0.0, prior - v.squaredNorm());
  out.std_err = std::sqrt(var);
  return out;
}

std::vector<Prediction> predict(const GPModel& m, const std::vector<double>& xs) {
  const int d = m.dim;
  if (xs.size() % d != 0) fail(errc::length_mismatch, "query size not a multiple of dim");
  const int q = static_cast<int>(xs.size()) / d;
  std::vector<Prediction> out(q);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < q; ++i)
    out[i] = predict_one(m, xs.data() + static_cast<std::size_t>(i) * d);
  return out;
}

std::vector<double> predict_mean_grad(const GPModel& m, const double* x) {
  const int n = m.n(), d = m.dim;
  std::vector<double> xs(d);
  for (int j = 0; j < d; ++j) xs[j] = (x[j] - m.x_mean[j]) / m.x_scale[j];

  // d/dx* [theta0 exp(-0.5 theta1 |x*-xi|^2)] = -theta0 theta1 (x*-xi) exp(.)
  // d/dx* [theta3 <x*, xi>] = theta3 xi; chain rule through standardization.
  std::vector<double> grad(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* xi = m.train_x.data() + static_cast<std::size_t>(i) * d;
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
      const double diff = xs[j] - xi[j];
      sq += diff * diff;
    }
    const double e = m.params.theta0 * std::exp(-0.5 * m.params.theta1 * sq);
    for (int j = 0; j < d; ++j) {
      const double dk = -m.params.theta1 * (xs[j] - xi[j]) * e + m.params.theta3 * xi[j];
      grad[j] += dk * m.alpha[i];
    }
  }
  for (int j = 0; j < d; ++j) grad[j] /= m.x_scale[j];
  return grad;
}

std::vector<ZoneGPRegression> clustered_gp_regression(const Dataset& ds,
                                                      const ZoneAssignment& z,
                                                      const GridSpec& grid,
                                                      int curve_points) {
  if (ds.size() != static_cast<int>(z.labels.size()))
    fail(errc::length_mismatch, "dataset vs assignment");
  if (curve_points < 2) fail(errc::domain_violation, "curve needs >= 2 points");

  // Per-member regression input/target: log10 income vs time-averaged log10
  // consumption per household.
  std::vector<std::vector<double>> xs(z.k), ys(z.k);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    const auto pattern = log_hec_pattern(rec);
    double avg = 0.0;
    for (double v : pattern) avg += v;
    avg /= static_cast<double>(pattern.size());
    xs[z.labels[i]].push_back(std::log10(rec.phi));
    ys[z.labels[i]].push_back(avg);
  }
  for (int c = 0; c < z.k; ++c)
    if (xs[c].size() < 5)
      fail(errc::empty_zone, "zone " + std::to_string(c) + " has fewer than 5 members");

  std::vector<ZoneGPRegression> out(z.k);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < z.k; ++c) {
    ZoneGPRegression r;
    r.zone = c;
    r.model = fit_gp(xs[c], 1, ys[c], grid);
    const auto [lo_it, hi_it] = std::minmax_element(xs[c].begin(), xs[c].end());
    const double lo = *lo_it, hi = *hi_it;
    r.curve.resize(curve_points);
    for (int i = 0; i < curve_points; ++i) {
      const double x = lo + (hi - lo) * i / (curve_points - 1);
      const Prediction pr = predict_one(r.model, &x);
      r.curve[i] = {x, pr.mean, pr.mean - 2.0 * pr.std_err, pr.mean + 2.0 * pr.std_err};
    }
    out[c] = std::move(r);
  }
  return out;
}

}  // namespace ecz
