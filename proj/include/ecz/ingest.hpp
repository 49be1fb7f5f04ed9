#ifndef ECZ_INGEST_HPP
#define ECZ_INGEST_HPP

#include <filesystem>

#include "ecz/types.hpp"

namespace ecz {

// Report-only consistency counts; parsing never drops rows for these.
struct ValidationReport {
  int records = 0;
  int nonpositive_ec_months = 0;   // ec[t] <= 0 (breaks the log transform downstream)
  int phi_lt_pci_records = 0;      // household income below per-capita income
  int coord_violations = 0;        // lat or lon outside the valid range

  bool clean() const {
    return nonpositive_ec_months == 0 && phi_lt_pci_records == 0 && coord_violations == 0;
  }
};

// Wide CSV, one row per block group:
//   id,lat,lon,phi,pci,population,ec_1..ec_T,hh_1..hh_T
// T is inferred from the header; ec_* and hh_* column counts must match.
Dataset parse_dataset(const std::filesystem::path& path);

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

// Zone labels as `id,zone` rows, aligned with a dataset by id.
void write_labels_csv(const std::vector<std::string>& ids, const std::vector<int>& labels,
                      const std::filesystem::path& path);
std::vector<int> read_labels_csv(const Dataset& ds, const std::filesystem::path& path);

ValidationReport validate(const Dataset& ds);

}  // namespace ecz

#endif
