#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <numeric>

#include "ecz/clustering.hpp"
#include "ecz/rng.hpp"
#include "ecz/stats.hpp"
#include "ecz/synth.hpp"
#include "ecz/transforms.hpp"

using namespace ecz;

TEST_SUITE("synth") {

TEST_CASE("config json round-trip") {
  const SynthConfig cfg = default_config();
  const SynthConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.n_per_zone == cfg.n_per_zone);
  CHECK(back.zone_radius_miles == cfg.zone_radius_miles);
  CHECK(back.years == cfg.years);
  CHECK(back.seed == cfg.seed);
  CHECK(back.spatial_kernel.theta1 == cfg.spatial_kernel.theta1);
  for (int c = 0; c < cfg.zones(); ++c) {
    CHECK(back.zone_centers[c].lat == cfg.zone_centers[c].lat);
    CHECK(back.seasonal_templates[c] == cfg.seasonal_templates[c]);
    CHECK(back.income[c].slope == cfg.income[c].slope);
  }
  CHECK_THROWS_AS(config_from_json("{not json"), Error);
}

TEST_CASE("inconsistent zone counts are a config error") {
  SynthConfig cfg = default_config();
  cfg.income.pop_back();
  try {
    generate(cfg);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
  }
}

TEST_CASE("generation is bit-reproducible across runs and thread counts") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {50, 50, 50};
  cfg.seed = 321;
  const Dataset a = generate(cfg);
  const Dataset b = generate(cfg);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.records[i].ec == b.records[i].ec);
    CHECK(a.records[i].lat == b.records[i].lat);
    CHECK(a.records[i].phi == b.records[i].phi);
  }

#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Dataset c = generate(cfg);
  omp_set_num_threads(saved);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.records[i].ec == c.records[i].ec);
    CHECK(a.records[i].households == c.records[i].households);
  }
#endif
}

TEST_CASE("planted values survive the consumption pipeline") {
  // hec/log round-trips the planted level: log10(ec/hh) must equal the value
  // the generator produced to near machine precision.
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {30, 30, 30};
  cfg.obs_noise_sd = 0.0;
  cfg.spatial_kernel = {1e-30, 150.0, 0.0, 0.0, 1e-30};
  for (auto& inc : cfg.income) inc.noise_sd = 0.0;
  const Dataset ds = generate(cfg);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    const int zone = (*ds.labels)[i];
    const auto& inc = cfg.income[zone];
    const double log_phi = std::log10(rec.phi);
    const auto pattern = log_hec_pattern(rec);
    for (int t = 0; t < ds.months; ++t) {
      const double planted =
          inc.slope * log_phi + inc.intercept + cfg.seasonal_templates[zone][t % 12];
      CHECK(std::abs(pattern[t] - planted) < 1e-9);
    }
  }
}

TEST_CASE("zero noise and one template collapse to identical normalized patterns") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {40};
  cfg.zone_centers = {cfg.zone_centers[0]};
  cfg.seasonal_templates = {cfg.seasonal_templates[0]};
  cfg.income = {{4.8, 0.0, 0.5, 0.3, 0.0}};  // constant income too
  cfg.obs_noise_sd = 0.0;
  cfg.spatial_kernel = {1e-30, 150.0, 0.0, 0.0, 1e-30};
  const Dataset ds = generate(cfg);
  const PatternMatrix pm = normalize_rows(log_hec_patterns(ds));
  for (int i = 1; i < pm.n; ++i)
    for (int t = 0; t < pm.T; ++t)
      CHECK(pm.at(i, t) == doctest::Approx(pm.at(0, t)).epsilon(1e-9));
}

TEST_CASE("kmeans recovers the planted zones across seeds") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    SynthConfig cfg = default_config();
    cfg.n_per_zone = {120, 120, 120};
    cfg.seed = seed;
    const Dataset ds = generate(cfg);
    const PatternMatrix pm = normalize_rows(log_hec_patterns(ds));
    KmeansOptions opt;
    opt.nstart = 25;
    opt.seed = seed;
    const ZoneAssignment z = kmeans(pm, 3, opt);
    CHECK(adjusted_rand_index(z.labels, *ds.labels) >= 0.99);
  }
}

TEST_CASE("clustered regression recovers a planted slope") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {1000};
  cfg.zone_centers = {cfg.zone_centers[0]};
  cfg.seasonal_templates = {cfg.seasonal_templates[0]};
  cfg.income = {{4.8, 0.3, 0.60, -0.27, 0.05}};
  cfg.spatial_kernel = {1e-30, 150.0, 0.0, 0.0, 1e-30};
  cfg.seed = 77;
  const Dataset ds = generate(cfg);
  ZoneAssignment z;
  z.labels = *ds.labels;
  z.k = 1;
  z.T = ds.months;
  const ClusteredRegression cr = clustered_regression(ds, z);
  CHECK(std::abs(cr.zones[0].slope - 0.60) < 0.02);
}

TEST_CASE("monthly averages show the scale-shift structure") {
  // Patterns in a zone differ essentially by a constant: the first principal
  // component of the 12 monthly averages is close to the constant direction
  // and dominates the variance.
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {300};
  cfg.zone_centers = {cfg.zone_centers[0]};
  cfg.seasonal_templates = {cfg.seasonal_templates[0]};
  cfg.income = {{4.8, 0.3, 0.55, 0.1, 0.05}};
  cfg.seed = 88;
  const Dataset ds = generate(cfg);
  const PatternMatrix avg = monthly_average_rows(log_hec_patterns(ds));
  const PCAResult p = pca(avg);
  CHECK(p.explained[0] >= 0.95);
  CHECK(near_constant_check(p) >= 0.99);
}

TEST_CASE("sample_gprf: single point with unit variance is standard normal") {
  double sum = 0.0, sq = 0.0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    const auto v = sample_gprf({{34.0, -118.0}}, {1.0, 1.0, 0.0, 0.0, 0.0}, 9000 + s);
    sum += v[0];
    sq += v[0] * v[0];
  }
  const double mean = sum / trials;
  const double var = sq / trials - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("sample_gprf: coincident points get identical values") {
  const GeoPoint p{34.1, -118.2};
  const auto v = sample_gprf({p, p}, {1.0, 5.0, 0.0, 0.0, 0.0}, 4);
  CHECK(std::abs(v[0] - v[1]) < 1e-8);
}

TEST_CASE("sample_gprf: empirical covariance over draws matches the kernel") {
  const std::vector<GeoPoint> pts{
      {34.00, -118.40}, {34.02, -118.38}, {34.05, -118.35}, {34.01, -118.30},
      {34.08, -118.42}};
  const KernelParams p{1.0, 80.0, 0.0, 0.0, 0.0};
  const int n = static_cast<int>(pts.size());
  const int draws = 5000;

  std::vector<double> mean(n, 0.0);
  std::vector<double> cov(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::vector<double>> samples(draws);
  for (int s = 0; s < draws; ++s) samples[s] = sample_gprf(pts, p, 100000 + s);
  for (int s = 0; s < draws; ++s)
    for (int i = 0; i < n; ++i) mean[i] += samples[s][i];
  for (int i = 0; i < n; ++i) mean[i] /= draws;
  for (int s = 0; s < draws; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cov[static_cast<std::size_t>(i) * n + j] +=
            (samples[s][i] - mean[i]) * (samples[s][j] - mean[j]);
  for (auto& v : cov) v /= (draws - 1);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dx = pts[i].lon - pts[j].lon;
      const double dy = pts[i].lat - pts[j].lat;
      const double expect = p.theta0 * std::exp(-0.5 * p.theta1 * (dx * dx + dy * dy));
      const double got = cov[static_cast<std::size_t>(i) * n + j];
      num += (got - expect) * (got - expect);
      den += expect * expect;
    }
  CHECK(std::sqrt(num / den) < 0.10);  // Frobenius relative error
}

}  // TEST_SUITE
