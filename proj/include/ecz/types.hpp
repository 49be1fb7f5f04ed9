#ifndef ECZ_TYPES_HPP
#define ECZ_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecz/errors.hpp"

namespace ecz {

struct GeoPoint {
  double lat = 0.0;  // degrees in [-90, 90]
  double lon = 0.0;  // degrees in [-180, 180]
};

// One census block group: per-month consumption totals and household counts
// over the study window, plus income covariates.
struct BlockGroupRecord {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
  double phi = 0.0;         // income per household, $/year
  double pci = 0.0;         // income per capita, $/year
  double population = 0.0;  // persons
  std::vector<double> ec;          // monthly electricity consumption, kWh
  std::vector<double> households;  // monthly household counts, each >= 1

  int months() const { return static_cast<int>(ec.size()); }
};

struct Dataset {
  std::vector<BlockGroupRecord> records;
  int months = 0;
  // Ground-truth zone labels; present only for generated data.
  std::optional<std::vector<int>> labels;

  int size() const { return static_cast<int>(records.size()); }
};

enum class PatternKind { raw_log_hec, normalized_log_hec, monthly_avg_log_hec };

// Dense n x T matrix of per-block-group consumption patterns, row-aligned
// with ids. kind == normalized_log_hec implies every row sums to 1.
struct PatternMatrix {
  int n = 0;
  int T = 0;
  PatternKind kind = PatternKind::raw_log_hec;
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major n*T

  double at(int i, int t) const { return values[static_cast<std::size_t>(i) * T + t]; }
  double& at(int i, int t) { return values[static_cast<std::size_t>(i) * T + t]; }
  const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * T; }
  double* row(int i) { return values.data() + static_cast<std::size_t>(i) * T; }
};

// Covariance function parameters:
//   k(x, x') = theta0 * exp(-0.5 * theta1 * |x - x'|^2) + theta2 + theta3 * <x, x'>
// plus observation noise sigma_n2 on the diagonal.
struct KernelParams {
  double theta0 = 1.0;   // signal variance
  double theta1 = 1.0;   // inverse squared length scale
  double theta2 = 0.0;   // bias
  double theta3 = 0.0;   // linear term coefficient
  double sigma_n2 = 0.0; // noise variance

  void check() const {
    if (theta0 < 0 || theta1 < 0 || theta2 < 0 || theta3 < 0 || sigma_n2 < 0)
      fail(errc::domain_violation, "kernel parameters must be nonnegative");
    if (theta0 == 0 && theta2 == 0 && theta3 == 0)
      fail(errc::domain_violation, "kernel must have a positive signal, bias, or linear term");
  }
};

}  // namespace ecz

#endif
