#include "ecz/ingest.hpp"

#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ecz/csv.hpp"

namespace ecz {

namespace {

// Header layout: fixed prefix, then ec_1..ec_T, then hh_1..hh_T.
constexpr const char* kPrefix[] = {"id", "lat", "lon", "phi", "pci", "population"};
constexpr int kPrefixLen = 6;

int header_months(const std::vector<std::string>& header) {
  for (int i = 0; i < kPrefixLen; ++i) {
    if (i >= static_cast<int>(header.size()) || header[i] != kPrefix[i])
      fail(errc::missing_column, std::string("expected column '") + kPrefix[i] +
                                     "' at position " + std::to_string(i + 1));
  }
  int n_ec = 0, n_hh = 0;
  for (std::size_t i = kPrefixLen; i < header.size(); ++i) {
    const std::string expect_ec = "ec_" + std::to_string(n_ec + 1);
    const std::string expect_hh = "hh_" + std::to_string(n_hh + 1);
    if (n_hh == 0 && header[i] == expect_ec) {
      ++n_ec;
    } else if (header[i] == expect_hh) {
      ++n_hh;
    } else {
      fail(errc::missing_column, "unexpected column '" + header[i] + "'");
    }
  }
  if (n_ec == 0) fail(errc::missing_column, "no ec_* columns");
  if (n_ec != n_hh)
    fail(errc::missing_column, "ec_* and hh_* column counts differ (" +
                                   std::to_string(n_ec) + " vs " + std::to_string(n_hh) + ")");
  return n_ec;
}

}  // namespace

Dataset parse_dataset(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  const int T = header_months(table.header);
  const std::size_t ncols = kPrefixLen + 2 * static_cast<std::size_t>(T);

  Dataset ds;
  ds.months = T;
  ds.records.reserve(table.rows.size());
  std::unordered_set<std::string> seen;
  seen.reserve(table.rows.size());

  for (std::size_t idx = 0; idx < table.rows.size(); ++idx) {
    const auto& fields = table.rows[idx];
    const int row = static_cast<int>(idx) + 2;  // 1-based, after the header
    if (fields.size() != ncols)
      fail(errc::length_mismatch, "row " + std::to_string(row) + ": expected " +
                                      std::to_string(ncols) + " fields, got " +
                                      std::to_string(fields.size()));
    BlockGroupRecord r;
    r.id = fields[0];
    if (r.id.empty()) fail(errc::malformed_number, "row " + std::to_string(row) + ": empty id");
    if (!seen.insert(r.id).second) fail(errc::duplicate_id, "'" + r.id + "'");
    r.lat = csv::parse_number(fields[1], row, "lat");
    r.lon = csv::parse_number(fields[2], row, "lon");
    r.phi = csv::parse_number(fields[3], row, "phi");
    r.pci = csv::parse_number(fields[4], row, "pci");
    r.population = csv::parse_number(fields[5], row, "population");
    r.ec.resize(T);
    r.households.resize(T);
    for (int t = 0; t < T; ++t)
      r.ec[t] = csv::parse_number(fields[kPrefixLen + t], row, "ec_" + std::to_string(t + 1));
    for (int t = 0; t < T; ++t)
      r.households[t] =
          csv::parse_number(fields[kPrefixLen + T + t], row, "hh_" + std::to_string(t + 1));

    const std::string at = "row " + std::to_string(row);
    for (int t = 0; t < T; ++t) {
      if (r.households[t] < 1.0)
        fail(errc::domain_violation, at + ": households < 1 in month " + std::to_string(t + 1));
      if (r.ec[t] < 0.0)
        fail(errc::domain_violation, at + ": negative consumption in month " + std::to_string(t + 1));
    }
    if (r.phi <= 0.0) fail(errc::domain_violation, at + ": phi must be positive");
    if (r.pci <= 0.0) fail(errc::domain_violation, at + ": pci must be positive");
    if (r.population < 1.0) fail(errc::domain_violation, at + ": population < 1");

    ds.records.push_back(std::move(r));
  }
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "id,lat,lon,phi,pci,population";
  for (int t = 1; t <= ds.months; ++t) out << ",ec_" << t;
  for (int t = 1; t <= ds.months; ++t) out << ",hh_" << t;
  out << "\n";
  for (const auto& r : ds.records) {
    out << r.id << ',' << csv::format_number(r.lat) << ',' << csv::format_number(r.lon) << ','
        << csv::format_number(r.phi) << ',' << csv::format_number(r.pci) << ','
        << csv::format_number(r.population);
    for (double v : r.ec) out << ',' << csv::format_number(v);
    for (double v : r.households) out << ',' << csv::format_number(v);
    out << "\n";
  }
  csv::write_file(path, out.str());
}

void write_labels_csv(const std::vector<std::string>& ids, const std::vector<int>& labels,
                      const std::filesystem::path& path) {
  if (ids.size() != labels.size()) fail(errc::length_mismatch, "ids vs labels");
  std::ostringstream out;
  out << "id,zone\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << "\n";
  csv::write_file(path, out.str());
}

std::vector<int> read_labels_csv(const Dataset& ds, const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  if (table.header.size() < 2 || table.header[0] != "id" || table.header[1] != "zone")
    fail(errc::missing_column, "labels file must have header id,zone");
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() < 2)
      fail(errc::length_mismatch, "labels row " + std::to_string(i + 2));
    by_id[table.rows[i][0]] =
        static_cast<int>(csv::parse_number(table.rows[i][1], static_cast<int>(i) + 2, "zone"));
  }
  std::vector<int> labels(ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto it = by_id.find(ds.records[i].id);
    if (it == by_id.end())
      fail(errc::missing_column, "no zone label for id '" + ds.records[i].id + "'");
    labels[i] = it->second;
  }
  return labels;
}

ValidationReport validate(const Dataset& ds) {
  ValidationReport rep;
  rep.records = ds.size();
  for (const auto& r : ds.records) {
    for (double v : r.ec)
      if (v <= 0.0) ++rep.nonpositive_ec_months;
    if (r.phi < r.pci) ++rep.phi_lt_pci_records;
    if (r.lat < -90.0 || r.lat > 90.0 || r.lon < -180.0 || r.lon > 180.0)
      ++rep.coord_violations;
  }
  return rep;
}

}  // namespace ecz
