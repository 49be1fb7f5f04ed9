#include "ecz/synth.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <json.hpp>

#include "ecz/rng.hpp"

namespace ecz {

using json = nlohmann::json;

namespace {

constexpr double kMilesPerDegLat = 69.09409442795152;  // earth radius 3958.8 mi

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Factor M with M * M^T = K + sigma_n2*I. Pivoted LDLT handles the positive
// semidefinite case exactly (coincident points must receive identical
// values), with the regression module's jittered Cholesky as fallback:
// 1e-10 * trace/n escalating tenfold up to 1e-4 * trace/n.
MatrixRM factor_for_sampling(MatrixRM K, double sigma_n2) {
  const int n = static_cast<int>(K.rows());
  const double scale = K.trace() / n;
  K.diagonal().array() += sigma_n2;

  Eigen::LDLT<MatrixRM> ldlt(K);
  if (ldlt.info() == Eigen::Success) {
    Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    if (dmax > 0.0 && d.minCoeff() >= -1e-12 * dmax) {
      for (int i = 0; i < n; ++i) d[i] = std::sqrt(std::max(0.0, d[i]));
      MatrixRM M = ldlt.matrixL();
      M = M * d.asDiagonal();
      return ldlt.transpositionsP().transpose() * M;
    }
  }

  double jitter = 0.0;
  for (int attempt = 0; attempt <= 7; ++attempt) {
    MatrixRM A = K;
    A.diagonal().array() += jitter;
    Eigen::LLT<MatrixRM> llt(A);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = (jitter == 0.0) ? 1e-10 * scale : jitter * 10.0;
    if (jitter > 1e-4 * scale) break;
  }
  fail(errc::singular_kernel, "field covariance not positive definite");
}

}  // namespace

void SynthConfig::check() const {
  const int k = zones();
  if (k < 1) fail(errc::config_error, "need at least one zone");
  if (static_cast<int>(zone_centers.size()) != k ||
      static_cast<int>(seasonal_templates.size()) != k ||
      static_cast<int>(income.size()) != k)
    fail(errc::config_error, "zone-indexed fields disagree on the zone count");
  for (int n : n_per_zone)
    if (n < 1) fail(errc::config_error, "every zone needs at least one block group");
  if (zone_radius_miles <= 0.0) fail(errc::config_error, "zone radius must be positive");
  if (years < 1) fail(errc::config_error, "years must be >= 1");
  if (obs_noise_sd < 0.0) fail(errc::config_error, "negative observation noise");
  for (const auto& tpl : seasonal_templates)
    for (double v : tpl)
      if (v <= 0.0) fail(errc::config_error, "seasonal templates must be strictly positive");
  for (const auto& inc : income) {
    if (inc.log_phi_sd < 0.0 || inc.noise_sd < 0.0)
      fail(errc::config_error, "negative spread parameter");
  }
  spatial_kernel.check();
}

SynthConfig default_config() {
  SynthConfig cfg;
  cfg.n_per_zone = {400, 400, 400};
  cfg.zone_centers = {{34.05, -118.45}, {34.45, -118.40}, {34.10, -117.95}};
  cfg.zone_radius_miles = 8.0;
  cfg.seasonal_templates = {
      // Coastal: winter peak, low annual swing.
      {{0.45, 0.42, 0.38, 0.33, 0.28, 0.25, 0.24, 0.25, 0.28, 0.33, 0.38, 0.43}},
      // Northern valley: strong summer peak.
      {{0.22, 0.20, 0.22, 0.26, 0.32, 0.42, 0.55, 0.58, 0.50, 0.38, 0.28, 0.24}},
      // Eastern valley: moderate summer peak.
      {{0.25, 0.24, 0.25, 0.28, 0.33, 0.40, 0.48, 0.50, 0.44, 0.36, 0.30, 0.27}},
  };
  cfg.income = {
      {5.00, 0.25, 0.46, 0.36, 0.05},
      {4.75, 0.25, 0.60, -0.27, 0.05},
      {4.70, 0.25, 0.61, -0.22, 0.05},
  };
  cfg.spatial_kernel = {0.005, 150.0, 0.0, 0.0, 1e-6};
  cfg.obs_noise_sd = 0.02;
  cfg.years = 6;
  cfg.seed = 1;
  return cfg;
}

std::vector<double> sample_gprf(const std::vector<GeoPoint>& points, const KernelParams& p,
                                std::uint64_t seed) {
  p.check();
  const int n = static_cast<int>(points.size());
  if (n < 1) fail(errc::too_few_rows, "need at least one point");

  MatrixRM K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double dx = points[i].lon - points[j].lon;
      const double dy = points[i].lat - points[j].lat;
      const double sq = dx * dx + dy * dy;
      const double dot = points[i].lon * points[j].lon + points[i].lat * points[j].lat;
      const double v = p.theta0 * std::exp(-0.5 * p.theta1 * sq) + p.theta2 + p.theta3 * dot;
      K(i, j) = v;
      K(j, i) = v;
    }
  const MatrixRM M = factor_for_sampling(std::move(K), p.sigma_n2);

  Rng rng(seed);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  const Eigen::VectorXd f = M * z;
  return std::vector<double>(f.data(), f.data() + n);
}

Dataset generate(const SynthConfig& cfg) {
  cfg.check();
  const int k = cfg.zones();
  const int T = 12 * cfg.years;

  int total = 0;
  std::vector<int> offset(k);
  for (int c = 0; c < k; ++c) {
    offset[c] = total;
    total += cfg.n_per_zone[c];
  }

  Dataset ds;
  ds.months = T;
  ds.records.resize(total);
  ds.labels = std::vector<int>(total);

  const Rng root(cfg.seed);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < k; ++c) {
    Rng rng = root.substream(c);
    const int nz = cfg.n_per_zone[c];
    const auto& inc = cfg.income[c];
    const auto& tpl = cfg.seasonal_templates[c];
    const GeoPoint center = cfg.zone_centers[c];
    const double miles_per_deg_lon =
        kMilesPerDegLat * std::cos(center.lat * 0.017453292519943295);

    // Positions uniform in the zone disk.
    std::vector<GeoPoint> pos(nz);
    for (int i = 0; i < nz; ++i) {
      const double r = cfg.zone_radius_miles * std::sqrt(rng.uniform());
      const double a = 6.283185307179586 * rng.uniform();
      pos[i].lat = center.lat + r * std::sin(a) / kMilesPerDegLat;
      pos[i].lon = center.lon + r * std::cos(a) / miles_per_deg_lon;
    }

    // Spatially correlated component of the base level, drawn jointly over
    // the zone through the kernel factor.
    const std::vector<double> field =
        sample_gprf(pos, cfg.spatial_kernel, rng.next_u64());

    for (int i = 0; i < nz; ++i) {
      BlockGroupRecord rec;
      const int global = offset[c] + i;
      char idbuf[32];
      std::snprintf(idbuf, sizeof idbuf, "bg_%05d", global);
      rec.id = idbuf;
      rec.lat = pos[i].lat;
      rec.lon = pos[i].lon;

      const double log_phi = rng.normal(inc.log_phi_mean, inc.log_phi_sd);
      rec.phi = std::pow(10.0, log_phi);
      const double pph = rng.uniform(2.0, 3.5);  // persons per household
      rec.pci = rec.phi / pph;

      const double households = static_cast<double>(200 + rng.below(1001));  // 200..1200
      rec.households.assign(T, households);
      rec.population = std::max(1.0, std::round(households * pph));

      const double base =
          inc.slope * log_phi + inc.intercept + rng.normal(0.0, inc.noise_sd) + field[i];

      rec.ec.resize(T);
      for (int t = 0; t < T; ++t) {
        const double logv = base + tpl[t % 12] + rng.normal(0.0, cfg.obs_noise_sd);
        rec.ec[t] = households * std::pow(10.0, logv);
      }

      ds.records[global] = std::move(rec);
      (*ds.labels)[global] = c;
    }
  }
  return ds;
}

SynthConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::config_error, std::string("config JSON: ") + e.what());
  }
  try {
    SynthConfig cfg;
    cfg.n_per_zone = j.at("n_per_zone").get<std::vector<int>>();
    for (const auto& c : j.at("zone_centers"))
      cfg.zone_centers.push_back({c.at("lat").get<double>(), c.at("lon").get<double>()});
    cfg.zone_radius_miles = j.at("zone_radius_miles").get<double>();
    for (const auto& t : j.at("seasonal_templates")) {
      std::array<double, 12> tpl{};
      if (t.size() != 12) fail(errc::config_error, "seasonal template must have 12 values");
      for (int m = 0; m < 12; ++m) tpl[m] = t.at(m).get<double>();
      cfg.seasonal_templates.push_back(tpl);
    }
    for (const auto& inc : j.at("income")) {
      ZoneIncomeParams p;
      p.log_phi_mean = inc.at("log_phi_mean").get<double>();
      p.log_phi_sd = inc.at("log_phi_sd").get<double>();
      p.slope = inc.at("slope").get<double>();
      p.intercept = inc.at("intercept").get<double>();
      p.noise_sd = inc.at("noise_sd").get<double>();
      cfg.income.push_back(p);
    }
    const auto& sk = j.at("spatial_kernel");
    cfg.spatial_kernel = {sk.at("theta0").get<double>(), sk.at("theta1").get<double>(),
                          sk.at("theta2").get<double>(), sk.at("theta3").get<double>(),
                          sk.at("sigma_n2").get<double>()};
    cfg.obs_noise_sd = j.at("obs_noise_sd").get<double>();
    cfg.years = j.at("years").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.check();
    return cfg;
  } catch (const json::exception& e) {
    fail(errc::config_error, std::string("config JSON: ") + e.what());
  }
}

std::string config_to_json(const SynthConfig& cfg) {
  json j;
  j["schema_version"] = "1";
  j["n_per_zone"] = cfg.n_per_zone;
  j["zone_centers"] = json::array();
  for (const auto& c : cfg.zone_centers)
    j["zone_centers"].push_back({{"lat", c.lat}, {"lon", c.lon}});
  j["zone_radius_miles"] = cfg.zone_radius_miles;
  j["seasonal_templates"] = json::array();
  for (const auto& t : cfg.seasonal_templates)
    j["seasonal_templates"].push_back(std::vector<double>(t.begin(), t.end()));
  j["income"] = json::array();
  for (const auto& p : cfg.income)
    j["income"].push_back({{"log_phi_mean", p.log_phi_mean},
                           {"log_phi_sd", p.log_phi_sd},
                           {"slope", p.slope},
                           {"intercept", p.intercept},
                           {"noise_sd", p.noise_sd}});
  j["spatial_kernel"] = {{"theta0", cfg.spatial_kernel.theta0},
                         {"theta1", cfg.spatial_kernel.theta1},
                         {"theta2", cfg.spatial_kernel.theta2},
                         {"theta3", cfg.spatial_kernel.theta3},
                         {"sigma_n2", cfg.spatial_kernel.sigma_n2}};
  j["obs_noise_sd"] = cfg.obs_noise_sd;
  j["years"] = cfg.years;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

}  // namespace ecz
