#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ecz/gp.hpp"
#include "ecz/kernels.hpp"
#include "ecz/rng.hpp"
#include "ecz/synth.hpp"
#include "ecz/transforms.hpp"

using namespace ecz;

TEST_SUITE("gp") {

TEST_CASE("kernel hand evaluations") {
  KernelParams p{1.0, 1.0, 0.0, 0.0, 0.0};
  CHECK(kernel(0.7, 0.7, p) == doctest::Approx(1.0).epsilon(1e-15));

  p = {0.0, 1.0, 0.0, 1.0, 0.0};  // pure linear term
  CHECK(kernel(2.0, 3.0, p) == doctest::Approx(6.0).epsilon(1e-15));

  p = {1.0, 2.0, 0.5, 0.0, 0.0};  // |x - x'|^2 = 1 -> exp(-1) + 0.5
  CHECK(kernel(0.0, 1.0, p) == doctest::Approx(0.8678794411714423).epsilon(1e-15));

  // Symmetry in the arguments.
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.normal(), b = rng.normal();
    KernelParams q{rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.0),
                   rng.uniform(0.0, 1.0), 0.0};
    if (q.theta0 == 0.0 && q.theta2 == 0.0 && q.theta3 == 0.0) q.theta0 = 1.0;
    CHECK(kernel(a, b, q) == doctest::Approx(kernel(b, a, q)).epsilon(1e-15));
  }
}

TEST_CASE("kernel matrices are positive semidefinite") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 24;
    std::vector<double> pts(n * 2);
    for (double& v : pts) v = rng.normal();
    KernelParams p{rng.uniform(0.1, 3.0), rng.uniform(0.1, 5.0), rng.uniform(0.0, 1.0),
                   rng.uniform(0.0, 1.0), 0.0};
    std::vector<double> K(static_cast<std::size_t>(n) * n);
    kernels::kernel_matrix(pts.data(), n, 2, p, K.data());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        M(K.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    CHECK(min_eig >= -1e-8 * std::max(1.0, max_eig));
  }
}

TEST_CASE("noiseless interpolation at training points") {
  // Length scale comparable to the point spacing keeps the kernel matrix
  // well conditioned; interpolation is then exact to solver precision.
  const int n = 20;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -2.0 + 4.0 * i / (n - 1);
    y[i] = std::sin(1.7 * x[i]) + 0.2 * x[i];
  }
  const GPModel m = fit_gp_fixed(x, 1, y, {1.0, 30.0, 0.0, 0.0, 0.0});
  const auto preds = predict(m, x);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(preds[i].mean - y[i]) < 1e-8);
    CHECK(preds[i].std_err <= 1e-4);
  }
}

TEST_CASE("reverts to the prior far from the data") {
  std::vector<double> x{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> y{0.3, 0.1, -0.2, 0.05, 0.4};
  const GPModel m = fit_gp_fixed(x, 1, y, {1.7, 1.0, 0.0, 0.0, 0.0});
  const double far = 1e6;
  const auto pred = predict(m, {far});
  const double y_mean = (0.3 + 0.1 - 0.2 + 0.05 + 0.4) / 5.0;
  CHECK(std::abs(pred[0].mean - y_mean) < 1e-6);
  CHECK(std::abs(pred[0].std_err * pred[0].std_err - 1.7) < 1e-6);
}

TEST_CASE("predictive variance never exceeds the prior variance") {
  Rng rng(5);
  const int n = 30;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform(-3.0, 3.0);
    y[i] = rng.normal();
  }
  KernelParams p{2.0, 1.5, 0.3, 0.0, 1e-3};
  const GPModel m = fit_gp_fixed(x, 1, y, p);
  for (int q = 0; q < 100; ++q) {
    const double xq = rng.uniform(-5.0, 5.0);
    const auto pr = predict(m, {xq});
    const double xs = (xq - m.x_mean[0]) / m.x_scale[0];
    const double prior = kernel(xs, xs, p);
    CHECK(pr[0].std_err * pr[0].std_err <= prior + 1e-9);
    CHECK(pr[0].std_err >= 0.0);
  }
}

TEST_CASE("log marginal likelihood matches a dense-inverse evaluation") {
  Rng rng(7);
  for (int n : {10, 30, 50}) {
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(-2.0, 2.0);
      y[i] = std::cos(x[i]) + rng.normal(0.0, 0.1);
    }
    KernelParams p{1.2, 2.0, 0.1, 0.05, 0.01};
    const GPModel m = fit_gp_fixed(x, 1, y, p);

    // Independent route: explicit inverse and determinant on the same matrix.
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        K(i, j) = kernel(m.train_x[i], m.train_x[j], p);
    K.diagonal().array() += p.sigma_n2 + m.jitter;
    Eigen::VectorXd yc(n);
    for (int i = 0; i < n; ++i) yc[i] = y[i] - m.y_mean;
    const Eigen::MatrixXd Kinv = K.fullPivLu().inverse();
    const double quad = yc.dot(Kinv * yc);
    const double logdet = std::log(K.fullPivLu().determinant());
    const double lml_dense =
        -0.5 * quad - 0.5 * logdet - 0.5 * n * 1.8378770664093454836;
    CHECK(m.log_marginal == doctest::Approx(lml_dense).epsilon(1e-8));
  }
}

TEST_CASE("factor reconstructs the kernel matrix") {
  Rng rng(11);
  const int n = 25;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
    y[i] = rng.normal();
  }
  KernelParams p{1.0, 3.0, 0.2, 0.1, 0.05};
  const GPModel m = fit_gp_fixed(x, 1, y, p);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      L(m.chol.data(), n, n);
  const Eigen::MatrixXd R = L * L.transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expect = kernel(m.train_x[i], m.train_x[j], p);
      if (i == j) expect += p.sigma_n2 + m.jitter;
      CHECK(R(i, j) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("grid fit reproduces exactly linear data") {
  const int n = 40;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -1.0 + 2.0 * i / (n - 1);
    y[i] = 2.5 * x[i] + 0.7;
  }
  GridSpec grid;  // default includes a linear-dominant corner
  const GPModel m = fit_gp(x, 1, y, grid);
  const auto preds = predict(m, x);
  for (int i = 0; i < n; ++i) CHECK(std::abs(preds[i].mean - y[i]) < 1e-6);
}

TEST_CASE("grid fit explains constant targets with bias and noise") {
  const int n = 25;
  std::vector<double> x(n), y(n, 4.2);
  for (int i = 0; i < n; ++i) x[i] = i * 0.3;
  const GPModel m = fit_gp(x, 1, y);
  const auto preds = predict(m, {0.15, 3.3, 7.4});
  for (const auto& pr : preds) CHECK(std::abs(pr.mean - 4.2) < 1e-8);
}

TEST_CASE("fitted likelihood is no worse than the truth less 5 nats") {
  // Targets drawn from a known kernel; the fitted parameters should explain
  // the draw about as well as the generating ones.
  const KernelParams truth{1.0, 4.0, 0.0, 0.0, 0.01};
  int ok = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(1000 + trial);
    const int n = 200;
    std::vector<GeoPoint> pts(n);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(-2.0, 2.0);
      pts[i] = {0.0, x[i]};  // 1-D inputs embedded on the lon axis
    }
    const std::vector<double> y = sample_gprf(pts, truth, rng.next_u64());

    const GPModel fitted = fit_gp(x, 1, y);
    // The model works on standardized inputs, so the generating length scale
    // has to be rescaled by the input variance to mean the same thing.
    double mx = 0.0, sx = 0.0;
    for (double v : x) mx += v;
    mx /= n;
    for (double v : x) sx += (v - mx) * (v - mx);
    sx = std::sqrt(sx / (n - 1));
    KernelParams truth_std = truth;
    truth_std.theta1 = truth.theta1 * sx * sx;
    const GPModel at_truth = fit_gp_fixed(x, 1, y, truth_std);
    if (fitted.log_marginal >= at_truth.log_marginal - 5.0) ++ok;
  }
  CHECK(ok == trials);
}

TEST_CASE("mean gradient matches central finite differences") {
  Rng rng(13);
  const int n = 30;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform(-2.0, 2.0);
    y[i] = std::sin(x[i]);
  }
  const GPModel m = fit_gp_fixed(x, 1, y, {1.0, 2.0, 0.0, 0.3, 1e-4});
  for (double xq : {-1.3, 0.2, 0.9, 1.7}) {
    const auto grad = predict_mean_grad(m, &xq);
    const double h = 1e-5;
    double lo = xq - h, hi = xq + h;
    const double fd = (predict_one(m, &hi).mean - predict_one(m, &lo).mean) / (2 * h);
    CHECK(grad[0] == doctest::Approx(fd).epsilon(1e-5));
  }

  // 2-D check.
  std::vector<double> x2(static_cast<std::size_t>(n) * 2), y2(n);
  for (int i = 0; i < n; ++i) {
    x2[i * 2] = rng.uniform(-1.0, 1.0);
    x2[i * 2 + 1] = rng.uniform(-1.0, 1.0);
    y2[i] = x2[i * 2] * x2[i * 2 + 1];
  }
  const GPModel m2 = fit_gp_fixed(x2, 2, y2, {1.0, 1.0, 0.0, 0.0, 1e-4});
  double q[2] = {0.3, -0.4};
  const auto grad = predict_mean_grad(m2, q);
  for (int jdim = 0; jdim < 2; ++jdim) {
    const double h = 1e-5;
    double qlo[2] = {q[0], q[1]}, qhi[2] = {q[0], q[1]};
    qlo[jdim] -= h;
    qhi[jdim] += h;
    const double fd = (predict_one(m2, qhi).mean - predict_one(m2, qlo).mean) / (2 * h);
    CHECK(grad[jdim] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("coverage of the 2-standard-error band on a known-kernel draw") {
  // 500 sites several length scales apart, one training and one held-out
  // point per site: residuals are then independent across sites and the
  // inside/outside counts are genuinely binomial.
  const KernelParams truth{1.0, 4.0, 0.0, 0.0, 0.0};
  Rng rng(17);
  const int sites = 500;
  std::vector<GeoPoint> pts(2 * sites);
  for (int i = 0; i < sites; ++i) {
    const double base = 3.0 * i;           // 6 length scales between sites
    pts[i] = {0.0, base};                   // training point
    pts[sites + i] = {0.0, base + 0.3};     // held-out point, corr ~ 0.70
  }
  const std::vector<double> f = sample_gprf(pts, truth, 555);

  const double noise_sd = 0.05;
  std::vector<double> x_train(sites), y_train(sites);
  for (int i = 0; i < sites; ++i) {
    x_train[i] = pts[i].lon;
    y_train[i] = f[i] + rng.normal(0.0, noise_sd);
  }
  // Express the generating kernel on the model's standardized input scale.
  double mx = 0.0, sx = 0.0;
  for (double v : x_train) mx += v;
  mx /= sites;
  for (double v : x_train) sx += (v - mx) * (v - mx);
  sx = std::sqrt(sx / (sites - 1));
  KernelParams fitp = truth;
  fitp.theta1 = truth.theta1 * sx * sx;
  fitp.sigma_n2 = noise_sd * noise_sd;
  const GPModel m = fit_gp_fixed(x_train, 1, y_train, fitp);

  int inside = 0;
  for (int i = 0; i < sites; ++i) {
    const double xq = pts[sites + i].lon;
    const auto pr = predict_one(m, &xq);
    if (std::abs(f[sites + i] - pr.mean) <= 2.0 * pr.std_err) ++inside;
  }
  const double rate = static_cast<double>(inside) / sites;
  CHECK(rate >= 0.92);
  CHECK(rate <= 0.975);
}

TEST_CASE("clustered GP regression on planted per-zone curves") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {80, 80, 80};
  cfg.seed = 2024;
  const Dataset ds = generate(cfg);
  ZoneAssignment z;
  z.labels = *ds.labels;
  z.k = 3;
  z.T = ds.months;

  GridSpec grid;
  grid.theta0 = {0.01, 0.1};
  grid.theta1 = {0.5, 2.0};
  grid.theta2 = {0.0};
  grid.theta3 = {0.0, 0.1};
  grid.sigma_n2 = {1e-3, 1e-2};
  const auto fits = clustered_gp_regression(ds, z, grid, 60);
  REQUIRE(fits.size() == 3);

  // Per-zone models should predict their own zone better than a pooled model.
  std::vector<double> x_all, y_all;
  std::vector<std::vector<double>> x_zone(3), y_zone(3);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    const auto pat = log_hec_pattern(rec);
    double avg = 0.0;
    for (double v : pat) avg += v;
    avg /= pat.size();
    x_all.push_back(std::log10(rec.phi));
    y_all.push_back(avg);
    x_zone[(*ds.labels)[i]].push_back(std::log10(rec.phi));
    y_zone[(*ds.labels)[i]].push_back(avg);
  }
  const GPModel pooled = fit_gp(x_all, 1, y_all, grid);

  double rmse_zoned = 0.0, rmse_pooled = 0.0;
  int count = 0;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < x_zone[c].size(); ++i) {
      const double yz = predict_one(fits[c].model, &x_zone[c][i]).mean;
      const double yp = predict_one(pooled, &x_zone[c][i]).mean;
      rmse_zoned += (yz - y_zone[c][i]) * (yz - y_zone[c][i]);
      rmse_pooled += (yp - y_zone[c][i]) * (yp - y_zone[c][i]);
      ++count;
    }
  }
  rmse_zoned = std::sqrt(rmse_zoned / count);
  rmse_pooled = std::sqrt(rmse_pooled / count);
  CHECK(rmse_zoned < rmse_pooled);

  // Bands widen toward the sparse income tails.
  for (const auto& f : fits) {
    const auto& mid = f.curve[f.curve.size() / 2];
    const double band_mid = mid.hi - mid.lo;
    const double band_lo_edge = f.curve.front().hi - f.curve.front().lo;
    const double band_hi_edge = f.curve.back().hi - f.curve.back().lo;
    CHECK(band_lo_edge > band_mid);
    CHECK(band_hi_edge > band_mid);
  }
}

TEST_CASE("clustered GP band is thin on exact linear data") {
  // Single zone, exact line: the linear kernel corner interpolates with a
  // negligible band across the training range.
  const int n = 30;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 4.0 + 1.5 * i / (n - 1);
    y[i] = 0.6 * x[i] - 0.2;
  }
  GridSpec grid;
  const GPModel m = fit_gp(x, 1, y, grid);
  for (int i = 0; i < n; ++i) {
    const auto pr = predict_one(m, &x[i]);
    CHECK(2.0 * pr.std_err <= 1e-3);
    CHECK(std::abs(pr.mean - y[i]) < 1e-5);
  }
}

TEST_CASE("zones below five members are rejected") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {4, 10, 10};
  const Dataset ds = generate(cfg);
  ZoneAssignment z;
  z.labels = *ds.labels;
  z.k = 3;
  z.T = ds.months;
  try {
    clustered_gp_regression(ds, z);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_zone);
  }
}

TEST_CASE("singular kernel surfaces after jitter escalation") {
  // Identical inputs with a rank-one linear kernel and no noise cannot be
  // factored even with jitter... but jitter actually rescues most cases, so
  // check the error path with an all-zero trace instead.
  std::vector<double> x(5, 0.0), y{1.0, 2.0, 3.0, 4.0, 5.0};
  // theta3-only kernel on all-zero standardized inputs gives a zero matrix.
  CHECK_THROWS_AS(fit_gp_fixed(x, 1, y, {0.0, 1.0, 0.0, 1.0, 0.0}), Error);
}

}  // TEST_SUITE
