#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecz/clustering.hpp"
#include "ecz/report.hpp"
#include "ecz/synth.hpp"
#include "ecz/transforms.hpp"

using namespace ecz;
namespace fs = std::filesystem;

TEST_SUITE("report") {

TEST_CASE("2x2 heatmap places extreme colors on both diagonals") {
  PatternMatrix pm;
  pm.n = 2;
  pm.T = 2;
  pm.ids = {"a", "b"};
  pm.values = {0.0, 1.0, 1.0, 0.0};
  const std::string svg = render_heatmap(pm, {0, 1});
  // Four cells plus the background rect.
  std::size_t rects = 0, pos = 0;
  while ((pos = svg.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  CHECK(rects == 5);
  // Low color appears twice (cells holding 0), high color twice (cells holding 1).
  const std::string lo = "#283cdc", hi = "#dc3c28";
  std::size_t lo_count = 0, hi_count = 0;
  for (pos = 0; (pos = svg.find(lo, pos)) != std::string::npos; pos += lo.size()) ++lo_count;
  for (pos = 0; (pos = svg.find(hi, pos)) != std::string::npos; pos += hi.size()) ++hi_count;
  CHECK(lo_count == 2);
  CHECK(hi_count == 2);
}

TEST_CASE("constant heatmap is a single color") {
  PatternMatrix pm;
  pm.n = 3;
  pm.T = 4;
  pm.ids = {"a", "b", "c"};
  pm.values.assign(12, 7.5);
  const std::string svg = render_heatmap(pm, {0, 1, 2});
  // Every cell uses the midpoint color.
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("#827882", pos)) != std::string::npos) {
    ++count;
    pos += 7;
  }
  CHECK(count == 12);
}

TEST_CASE("heatmap rejects a non-permutation") {
  PatternMatrix pm;
  pm.n = 2;
  pm.T = 1;
  pm.ids = {"a", "b"};
  pm.values = {0.0, 1.0};
  CHECK_THROWS_AS(render_heatmap(pm, {0, 0}), Error);
  CHECK_THROWS_AS(render_heatmap(pm, {0}), Error);
}

TEST_CASE("hierarchical order keeps planted blocks contiguous in the heatmap") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {40, 40};
  cfg.zone_centers = {cfg.zone_centers[0], cfg.zone_centers[1]};
  cfg.seasonal_templates = {cfg.seasonal_templates[0], cfg.seasonal_templates[1]};
  cfg.income = {cfg.income[0], cfg.income[1]};
  cfg.seed = 5;
  const Dataset ds = generate(cfg);
  const PatternMatrix pm = normalize_rows(log_hec_patterns(ds));
  const Dendrogram d = hierarchical_order(pm);
  int switches = 0;
  for (std::size_t i = 1; i < d.leaf_order.size(); ++i)
    if ((*ds.labels)[d.leaf_order[i]] != (*ds.labels)[d.leaf_order[i - 1]]) ++switches;
  CHECK(switches == 1);
  const std::string svg = render_heatmap(pm, d.leaf_order);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("scatter map colors points by zone") {
  SynthConfig cfg = default_config();
  cfg.n_per_zone = {10, 10, 10};
  const Dataset ds = generate(cfg);
  const std::string svg = render_scatter_map(ds, *ds.labels, 3);
  // 30 data dots + 3 legend dots.
  std::size_t circles = 0, pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++circles;
    pos += 7;
  }
  CHECK(circles == 33);
  CHECK(svg.find("#1f77b4") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);
  CHECK(svg.find("#2ca02c") != std::string::npos);
}

TEST_CASE("manifest writes atomically and serializes fields") {
  const fs::path dir = fs::temp_directory_path() / "ecz_manifest_test";
  fs::create_directories(dir);
  RunManifest m;
  m.subcommand = "cluster";
  m.seed = 42;
  m.inputs = {"data.csv"};
  m.outputs = {"labels.csv"};
  m.parameters["k"] = "3";
  m.wall_ms = 12.5;
  write_manifest(m, dir);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(!fs::exists(dir / "manifest.json.tmp"));
  std::ifstream in(dir / "manifest.json");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  CHECK(text.find("\"subcommand\": \"cluster\"") != std::string::npos);
  CHECK(text.find("\"seed\": 42") != std::string::npos);
  CHECK(text.find("\"schema_version\": \"1\"") != std::string::npos);
}

}  // TEST_SUITE
