#ifndef ECZ_SYNTH_HPP
#define ECZ_SYNTH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ecz/types.hpp"

namespace ecz {

struct ZoneIncomeParams {
  double log_phi_mean = 4.8;  // log10 of household income
  double log_phi_sd = 0.25;
  double slope = 0.5;      // base log10 HEC = slope * log10 PHI + intercept + noise
  double intercept = 0.0;
  double noise_sd = 0.05;
};

struct SynthConfig {
  std::vector<int> n_per_zone;
  std::vector<GeoPoint> zone_centers;
  double zone_radius_miles = 8.0;
  // Added to base log10 HEC month by month, tiled over the years; strictly
  // positive so normalized patterns stay well defined.
  std::vector<std::array<double, 12>> seasonal_templates;
  std::vector<ZoneIncomeParams> income;
  KernelParams spatial_kernel;   // correlated field over (lon, lat) degrees
  double obs_noise_sd = 0.02;    // independent monthly noise
  int years = 6;
  std::uint64_t seed = 1;

  int zones() const { return static_cast<int>(n_per_zone.size()); }
  void check() const;
};

// Three zones x 400 block groups over six years: a low-variability
// winter-peak zone and two summer-peak zones with larger annual swings,
// centers roughly 30 miles apart.
SynthConfig default_config();

// Ground-truth labels are recorded on the returned dataset. Bit-reproducible
// for a fixed seed regardless of thread count (one RNG substream per zone).
Dataset generate(const SynthConfig& cfg);

// Joint draw of a Gaussian random field at the given points: multivariate
// normal with covariance K + sigma_n2*I, sampled through the lower Cholesky
// factor.
std::vector<double> sample_gprf(const std::vector<GeoPoint>& points, const KernelParams& p,
                                std::uint64_t seed);

SynthConfig config_from_json(const std::string& text);
std::string config_to_json(const SynthConfig& cfg);

}  // namespace ecz

#endif
