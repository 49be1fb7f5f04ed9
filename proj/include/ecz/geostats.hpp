#ifndef ECZ_GEOSTATS_HPP
#define ECZ_GEOSTATS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "ecz/clustering.hpp"
#include "ecz/types.hpp"

namespace ecz {

// Great-circle distance, Earth radius 3958.8 miles.
double haversine_miles(const GeoPoint& p, const GeoPoint& q);

// Sample covariance of two equal-length series, denominator n-1.
double empirical_cov(const std::vector<double>& u, const std::vector<double>& v);

struct Moments {
  double mean = 0.0;
  double sd = 0.0;              // sample sd (n-1)
  double skewness = 0.0;        // moment-based (1/n central moments)
  double excess_kurtosis = 0.0;
};

Moments sample_moments(const std::vector<double>& xs);

// n/6 * (S^2 + K^2/4); under normality asymptotically chi-squared with 2
// degrees of freedom (5% critical value 5.99).
double jarque_bera(const std::vector<double>& xs);

// Per-zone distributions of pairwise geographic distance and pairwise series
// covariance. If the field behaves like a Gaussian process within the zone,
// both marginals should look Gaussian.
struct ZoneDiagnostics {
  int zone = 0;
  std::vector<double> dist_samples;  // miles
  std::vector<double> cov_samples;
  Moments dist_moments, cov_moments;
  double dist_jb = 0.0, cov_jb = 0.0;
  std::array<double, 4> joint_cov{};  // 2x2 covariance of (dist, cov) pairs
  bool insufficient_samples = false;  // too few pairs for stable higher moments
};

// Samples up to max_pairs distinct unordered member pairs per zone (all pairs
// when the zone is small enough). patterns must be raw log-HEC rows aligned
// with ds. Deterministic given (seed, max_pairs).
std::vector<ZoneDiagnostics> zone_diagnostics(const Dataset& ds,
                                              const PatternMatrix& patterns,
                                              const ZoneAssignment& z, int max_pairs,
                                              std::uint64_t seed);

}  // namespace ecz

#endif
