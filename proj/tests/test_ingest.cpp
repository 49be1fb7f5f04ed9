#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ecz/csv.hpp"
#include "ecz/ingest.hpp"
#include "ecz/synth.hpp"

using namespace ecz;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ecz_ingest_tests";
  fs::create_directories(dir);
  return dir / name;
}

// Tiny well-formed dataset with T=3.
std::string small_csv() {
  return "id,lat,lon,phi,pci,population,ec_1,ec_2,ec_3,hh_1,hh_2,hh_3\n"
         "a,34.0,-118.4,60000,25000,900,1000,1100,1200,10,10,10\n"
         "b,34.1,-118.3,75000,30000,800,900,950,1000,9,9,9\n"
         "c,34.2,-118.2,50000,20000,700,800,850,900,8,8,8\n";
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("parses a small wide CSV") {
  const auto path = temp_file("small.csv");
  csv::write_file(path, small_csv());
  const Dataset ds = parse_dataset(path);
  CHECK(ds.size() == 3);
  CHECK(ds.months == 3);
  CHECK(ds.records[0].id == "a");
  CHECK(ds.records[1].ec[2] == 1000.0);
  CHECK(ds.records[2].households[0] == 8.0);
  CHECK(ds.records[0].phi == 60000.0);
}

TEST_CASE("72-month header infers months from the column count") {
  std::string header = "id,lat,lon,phi,pci,population";
  for (int t = 1; t <= 72; ++t) header += ",ec_" + std::to_string(t);
  for (int t = 1; t <= 72; ++t) header += ",hh_" + std::to_string(t);
  std::string row = "x,34,-118,50000,20000,1000";
  for (int t = 0; t < 72; ++t) row += ",500";
  for (int t = 0; t < 72; ++t) row += ",10";
  const auto path = temp_file("wide.csv");
  csv::write_file(path, header + "\n" + row + "\n" + "y" + row.substr(1) + "\n");

  const Dataset ds = parse_dataset(path);
  CHECK(ds.months == 72);
  CHECK(ds.size() == 2);
  CHECK(ds.records[1].id == "y");
}

TEST_CASE("duplicate ids are rejected") {
  const auto path = temp_file("dup.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,0,0,100,50,10,5,2\n"
                  "a,0,0,100,50,10,5,2\n");
  CHECK_THROWS_WITH_AS(parse_dataset(path), doctest::Contains("DuplicateId"), Error);
}

TEST_CASE("households of zero is a domain violation, not a length mismatch") {
  const auto path = temp_file("hh0.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,0,0,100,50,10,5,0\n");
  try {
    parse_dataset(path);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::domain_violation);
  }
}

TEST_CASE("short row raises LengthMismatch with the row number") {
  const auto path = temp_file("short.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,0,0,100,50,10,5\n");
  CHECK_THROWS_WITH_AS(parse_dataset(path), doctest::Contains("row 2"), Error);
}

TEST_CASE("malformed number reports row and column") {
  const auto path = temp_file("bad.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,0,0,100,50,10,oops,2\n");
  CHECK_THROWS_WITH_AS(parse_dataset(path), doctest::Contains("ec_1"), Error);
}

TEST_CASE("non-finite numbers are rejected as malformed") {
  const auto path = temp_file("inf.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,0,0,inf,50,10,5,2\n");
  CHECK_THROWS_WITH_AS(parse_dataset(path), doctest::Contains("MalformedNumber"), Error);
  const auto path2 = temp_file("nan.csv");
  csv::write_file(path2,
                  "id,lat,lon,phi,pci,population,ec_1,hh_1\n"
                  "a,nan,0,100,50,10,5,2\n");
  CHECK_THROWS_AS(parse_dataset(path2), Error);
}

TEST_CASE("mismatched ec/hh column counts are rejected") {
  const auto path = temp_file("cols.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,ec_2,hh_1\n"
                  "a,0,0,100,50,10,5,5,2\n");
  CHECK_THROWS_AS(parse_dataset(path), Error);
}

TEST_CASE("generated dataset round-trips through CSV exactly") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {40, 40, 40};
  cfg.seed = 99;
  const Dataset ds = generate(cfg);
  const auto path = temp_file("roundtrip.csv");
  write_dataset_csv(ds, path);
  const Dataset back = parse_dataset(path);

  REQUIRE(back.size() == ds.size());
  REQUIRE(back.months == ds.months);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& a = ds.records[i];
    const auto& b = back.records[i];
    CHECK(a.id == b.id);
    CHECK(a.lat == b.lat);  // %.17g round-trips doubles exactly
    CHECK(a.lon == b.lon);
    CHECK(a.phi == b.phi);
    CHECK(a.pci == b.pci);
    CHECK(a.population == b.population);
    for (int t = 0; t < ds.months; ++t) {
      CHECK(a.ec[t] == b.ec[t]);
      CHECK(a.households[t] == b.households[t]);
    }
  }
}

TEST_CASE("validate reports without mutating") {
  const auto path = temp_file("flags.csv");
  csv::write_file(path,
                  "id,lat,lon,phi,pci,population,ec_1,ec_2,hh_1,hh_2\n"
                  "a,95,0,100,50,10,5,0,2,2\n"       // bad lat, one zero ec month
                  "b,34,-118,40,50,10,5,5,2,2\n");   // phi < pci
  const Dataset ds = parse_dataset(path);
  const Dataset copy = ds;
  const ValidationReport rep = validate(ds);
  CHECK(rep.records == 2);
  CHECK(rep.coord_violations == 1);
  CHECK(rep.nonpositive_ec_months == 1);
  CHECK(rep.phi_lt_pci_records == 1);
  CHECK(!rep.clean());
  CHECK(ds.records[0].ec == copy.records[0].ec);

  // A clean synthetic dataset reports all zeros.
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {30, 30, 30};
  const ValidationReport clean = validate(generate(cfg));
  CHECK(clean.clean());
}

TEST_CASE("labels csv round-trip") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {10, 10, 10};
  const Dataset ds = generate(cfg);
  std::vector<std::string> ids(ds.size());
  for (int i = 0; i < ds.size(); ++i) ids[i] = ds.records[i].id;
  const auto path = temp_file("labels.csv");
  write_labels_csv(ids, *ds.labels, path);
  CHECK(read_labels_csv(ds, path) == *ds.labels);
}

}  // TEST_SUITE
