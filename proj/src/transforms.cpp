#include "ecz/transforms.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ecz/clustering.hpp"
#include "ecz/csv.hpp"

namespace ecz {

double hec(double ec, double households) {
  if (households < 1.0) fail(errc::domain_violation, "households < 1");
  return ec / households;
}

std::vector<double> log_hec_pattern(const BlockGroupRecord& rec) {
  const int T = rec.months();
  if (static_cast<int>(rec.households.size()) != T)
    fail(errc::length_mismatch, "ec and households lengths differ for '" + rec.id + "'");
  std::vector<double> out(T);
  for (int t = 0; t < T; ++t) {
    if (rec.ec[t] <= 0.0)
      fail(errc::nonpositive_consumption,
           "'" + rec.id + "' month " + std::to_string(t + 1));
    out[t] = std::log10(hec(rec.ec[t], rec.households[t]));
  }
  return out;
}

std::vector<double> normalize_sum1(const std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (sum <= 0.0) fail(errc::nonpositive_sum, "pattern sums to " + std::to_string(sum));
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / sum;
  return out;
}

std::vector<double> monthly_average(const std::vector<double>& v) {
  if (v.size() % 12 != 0 || v.empty())
    fail(errc::length_mismatch, "monthly_average needs a multiple of 12 values");
  const int years = static_cast<int>(v.size()) / 12;
  std::vector<double> out(12, 0.0);
  for (int m = 0; m < 12; ++m) {
    double s = 0.0;
    for (int y = 0; y < years; ++y) s += v[y * 12 + m];
    out[m] = s / years;
  }
  return out;
}

PatternMatrix log_hec_patterns(const Dataset& ds) {
  PatternMatrix pm;
  pm.n = ds.size();
  pm.T = ds.months;
  pm.kind = PatternKind::raw_log_hec;
  pm.ids.resize(pm.n);
  pm.values.resize(static_cast<std::size_t>(pm.n) * pm.T);
  // Rows are independent; any NonpositiveConsumption is re-thrown after the
  // loop so parallel and serial runs fail identically.
  int bad_row = -1;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < pm.n; ++i) {
    const auto& rec = ds.records[i];
    bool ok = true;
    for (int t = 0; t < pm.T; ++t)
      if (rec.ec[t] <= 0.0) ok = false;
    if (!ok) {
#pragma omp critical
      { bad_row = (bad_row < 0) ? i : std::min(bad_row, i); }
      continue;
    }
    for (int t = 0; t < pm.T; ++t)
      pm.values[static_cast<std::size_t>(i) * pm.T + t] =
          std::log10(rec.ec[t] / rec.households[t]);
  }
  if (bad_row >= 0)
    fail(errc::nonpositive_consumption, "'" + ds.records[bad_row].id + "'");
  for (int i = 0; i < pm.n; ++i) pm.ids[i] = ds.records[i].id;
  return pm;
}

PatternMatrix normalize_rows(const PatternMatrix& pm) {
  PatternMatrix out = pm;
  out.kind = PatternKind::normalized_log_hec;
  int bad_row = -1;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < pm.n; ++i) {
    const double* r = pm.row(i);
    double sum = 0.0;
    for (int t = 0; t < pm.T; ++t) sum += r[t];
    if (sum <= 0.0) {
#pragma omp critical
      { bad_row = (bad_row < 0) ? i : std::min(bad_row, i); }
      continue;
    }
    double* o = out.row(i);
    for (int t = 0; t < pm.T; ++t) o[t] = r[t] / sum;
  }
  if (bad_row >= 0) fail(errc::nonpositive_sum, "row '" + pm.ids[bad_row] + "' sums <= 0");
  return out;
}

PatternMatrix monthly_average_rows(const PatternMatrix& pm) {
  if (pm.T % 12 != 0) fail(errc::length_mismatch, "pattern length is not a multiple of 12");
  PatternMatrix out;
  out.n = pm.n;
  out.T = 12;
  out.kind = PatternKind::monthly_avg_log_hec;
  out.ids = pm.ids;
  out.values.resize(static_cast<std::size_t>(pm.n) * 12);
  const int years = pm.T / 12;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < pm.n; ++i) {
    const double* r = pm.row(i);
    double* o = out.row(i);
    for (int m = 0; m < 12; ++m) {
      double s = 0.0;
      for (int y = 0; y < years; ++y) s += r[y * 12 + m];
      o[m] = s / years;
    }
  }
  return out;
}

std::vector<std::vector<double>> zone_annual_cycle(const PatternMatrix& patterns,
                                                   const ZoneAssignment& z) {
  if (patterns.n != static_cast<int>(z.labels.size()))
    fail(errc::length_mismatch, "pattern rows vs assignment length");
  const PatternMatrix avg = monthly_average_rows(patterns);
  std::vector<std::vector<double>> cycles(z.k, std::vector<double>(12, 0.0));
  std::vector<int> counts(z.k, 0);
  for (int i = 0; i < avg.n; ++i) {
    const int c = z.labels[i];
    ++counts[c];
    const double* r = avg.row(i);
    for (int m = 0; m < 12; ++m) cycles[c][m] += r[m];
  }
  for (int c = 0; c < z.k; ++c) {
    if (counts[c] == 0) fail(errc::empty_zone, "zone " + std::to_string(c));
    for (int m = 0; m < 12; ++m) cycles[c][m] /= counts[c];
  }
  return cycles;
}

void write_pattern_csv(const PatternMatrix& pm, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "id";
  for (int t = 1; t <= pm.T; ++t) out << ",v_" << t;
  out << "\n";
  for (int i = 0; i < pm.n; ++i) {
    out << pm.ids[i];
    const double* r = pm.row(i);
    for (int t = 0; t < pm.T; ++t) out << ',' << csv::format_number(r[t]);
    out << "\n";
  }
  csv::write_file(path, out.str());
}

}  // namespace ecz
