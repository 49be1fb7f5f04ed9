#ifndef ECZ_TRANSFORMS_HPP
#define ECZ_TRANSFORMS_HPP

#include <filesystem>

#include "ecz/types.hpp"

namespace ecz {

struct ZoneAssignment;  // clustering.hpp

// Household electricity consumption for one month: ec / households.
double hec(double ec, double households);

// log10 of HEC for every month of a record; every ec[t] must be positive.
std::vector<double> log_hec_pattern(const BlockGroupRecord& rec);

// v / sum(v); the result sums to 1. Throws NonpositiveSum when sum(v) <= 0,
// which can happen for log patterns when HEC drops below 1 kWh/household.
std::vector<double> normalize_sum1(const std::vector<double>& v);

// Collapse 72 monthly values into 12 calendar-month means across the years.
std::vector<double> monthly_average(const std::vector<double>& v);

// Row-wise pipeline stages. Rows are independent, so these run in parallel
// with deterministic output.
PatternMatrix log_hec_patterns(const Dataset& ds);
PatternMatrix normalize_rows(const PatternMatrix& pm);
PatternMatrix monthly_average_rows(const PatternMatrix& pm);

// Mean 12-month cycle of each zone's member rows; input patterns must carry
// 72 columns.
std::vector<std::vector<double>> zone_annual_cycle(const PatternMatrix& patterns,
                                                   const ZoneAssignment& z);

// `id,v_1..v_T` export used by the heatmap report.
void write_pattern_csv(const PatternMatrix& pm, const std::filesystem::path& path);

}  // namespace ecz

#endif
