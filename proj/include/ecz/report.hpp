#ifndef ECZ_REPORT_HPP
#define ECZ_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ecz/gp.hpp"
#include "ecz/stats.hpp"
#include "ecz/types.hpp"

namespace ecz {

// Static SVG plots; text output keeps results diffable and byte-stable.

// One cell per (block group, month); rows follow `order`, colors are a
// linear two-stop ramp over the value range.
std::string render_heatmap(const PatternMatrix& pm, const std::vector<int>& order);

// Equirectangular scatter (lon right, lat up), one dot per block group
// colored by zone.
std::string render_scatter_map(const Dataset& ds, const std::vector<int>& labels, int k);

// Mean 12-month cycle per zone.
std::string render_cycles(const std::vector<std::vector<double>>& cycles);

// Per-zone regression curves with shaded +/- 2 standard error bands.
std::string render_gp_curves(const std::vector<ZoneGPRegression>& zones);

std::string render_density_curves(const std::vector<DensityCurve>& curves,
                                  const std::vector<std::string>& names);

// Reproducibility sidecar written next to every subcommand's outputs.
struct RunManifest {
  std::string subcommand;
  std::string tool_version = "ecz 0.1.0";
  std::string schema_version = "1";
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

// Serialized as manifest.json; written to a temp file and renamed so readers
// never observe a partial manifest.
void write_manifest(const RunManifest& m, const std::filesystem::path& dir);

}  // namespace ecz

#endif
