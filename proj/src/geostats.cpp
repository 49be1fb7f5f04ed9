#include "ecz/geostats.hpp"

#include <algorithm>
#include <cmath>

#include "ecz/kernels.hpp"
#include "ecz/rng.hpp"

namespace ecz {

namespace {
constexpr double kEarthRadiusMiles = 3958.8;
constexpr double kDegToRad = 0.017453292519943295;
}  // namespace

double haversine_miles(const GeoPoint& p, const GeoPoint& q) {
  const double lat1 = p.lat * kDegToRad, lat2 = q.lat * kDegToRad;
  const double dlat = (q.lat - p.lat) * kDegToRad;
  const double dlon = (q.lon - p.lon) * kDegToRad;
  const double s1 = std::sin(0.5 * dlat), s2 = std::sin(0.5 * dlon);
  double a = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  a = std::clamp(a, 0.0, 1.0);
  return kEarthRadiusMiles * 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

double empirical_cov(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size() || u.size() < 2)
    fail(errc::length_mismatch, "covariance needs two equal series of length >= 2");
  const int n = static_cast<int>(u.size());
  double mu = 0.0, mv = 0.0;
  for (int i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= n;
  mv /= n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += (u[i] - mu) * (v[i] - mv);
  return acc / (n - 1);
}

Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  const int n = static_cast<int>(xs.size());
  if (n == 0) return m;
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.sd = n > 1 ? std::sqrt(m2 * n / (n - 1)) : 0.0;
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double jarque_bera(const std::vector<double>& xs) {
  const Moments m = sample_moments(xs);
  const double n = static_cast<double>(xs.size());
  return n / 6.0 * (m.skewness * m.skewness +
                    0.25 * m.excess_kurtosis * m.excess_kurtosis);
}

namespace {

std::array<double, 4> joint_covariance(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::array<double, 4> out{};
  const int n = static_cast<int>(a.size());
  if (n < 2) return out;
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sab = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sab += (a[i] - ma) * (b[i] - mb);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  out[0] = saa / (n - 1);
  out[1] = out[2] = sab / (n - 1);
  out[3] = sbb / (n - 1);
  return out;
}

}  // namespace

std::vector<ZoneDiagnostics> zone_diagnostics(const Dataset& ds,
                                              const PatternMatrix& patterns,
                                              const ZoneAssignment& z, int max_pairs,
                                              std::uint64_t seed) {
  if (ds.size() != patterns.n || ds.size() != static_cast<int>(z.labels.size()))
    fail(errc::length_mismatch, "dataset, patterns and assignment must align");
  if (max_pairs < 1) fail(errc::domain_violation, "max_pairs must be >= 1");

  const Rng root(seed);
  std::vector<ZoneDiagnostics> out;
  out.reserve(z.k);
  for (int zone = 0; zone < z.k; ++zone) {
    std::vector<int> members;
    for (int i = 0; i < ds.size(); ++i)
      if (z.labels[i] == zone) members.push_back(i);
    const int m = static_cast<int>(members.size());
    if (m < 2)
      fail(errc::empty_zone, "zone " + std::to_string(zone) + " has fewer than 2 members");

    const std::uint64_t all_pairs = static_cast<std::uint64_t>(m) * (m - 1) / 2;
    std::vector<std::pair<int, int>> pairs;
    if (all_pairs <= static_cast<std::uint64_t>(max_pairs)) {
      pairs.reserve(all_pairs);
      for (int i = 0; i < m - 1; ++i)
        for (int j = i + 1; j < m; ++j) pairs.emplace_back(members[i], members[j]);
    } else {
      Rng rng = root.substream(zone);
      const auto picks = rng.sample_distinct(all_pairs, max_pairs);
      pairs.reserve(picks.size());
      for (auto p : picks) {
        const auto [i, j] = kernels::condensed_decode(p, m);
        pairs.emplace_back(members[i], members[j]);
      }
    }

    ZoneDiagnostics d;
    d.zone = zone;
    const int np = static_cast<int>(pairs.size());
    d.dist_samples.resize(np);
    d.cov_samples.resize(np);
    const int T = patterns.T;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < np; ++p) {
      const auto [i, j] = pairs[p];
      const auto& ri = ds.records[i];
      const auto& rj = ds.records[j];
      d.dist_samples[p] =
          haversine_miles({ri.lat, ri.lon}, {rj.lat, rj.lon});
      const double* u = patterns.row(i);
      const double* v = patterns.row(j);
      double mu = 0.0, mv = 0.0;
      for (int t = 0; t < T; ++t) {
        mu += u[t];
        mv += v[t];
      }
      mu /= T;
      mv /= T;
      double acc = 0.0;
      for (int t = 0; t < T; ++t) acc += (u[t] - mu) * (v[t] - mv);
      d.cov_samples[p] = acc / (T - 1);
    }

    d.dist_moments = sample_moments(d.dist_samples);
    d.cov_moments = sample_moments(d.cov_samples);
    d.dist_jb = jarque_bera(d.dist_samples);
    d.cov_jb = jarque_bera(d.cov_samples);
    d.joint_cov = joint_covariance(d.dist_samples, d.cov_samples);
    d.insufficient_samples =
        np < 8 || d.dist_moments.sd == 0.0 || d.cov_moments.sd == 0.0;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace ecz
