#include "ecz/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecz/csv.hpp"
#include "ecz/geostats.hpp"
#include "ecz/gp.hpp"
#include "ecz/ingest.hpp"
#include "ecz/kernels.hpp"
#include "ecz/report.hpp"
#include "ecz/stats.hpp"
#include "ecz/synth.hpp"
#include "ecz/transforms.hpp"

namespace ecz {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct Ctx {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";

  fs::path out(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(errc::io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json regression_json(const RegressionModel& m) {
  return {{"slope", m.slope},
          {"intercept", m.intercept},
          {"r2", m.r2},
          {"n", m.n},
          {"residual_sd", m.residual_sd}};
}

json params_json(const KernelParams& p) {
  return {{"theta0", p.theta0},
          {"theta1", p.theta1},
          {"theta2", p.theta2},
          {"theta3", p.theta3},
          {"sigma_n2", p.sigma_n2}};
}

void write_json(const fs::path& path, const json& j) {
  csv::write_file(path, j.dump(2) + "\n");
}

GridSpec parse_grid(const std::string& spec) {
  if (spec == "default") return {};
  const json j = json::parse(read_text(spec));
  GridSpec g;
  if (j.contains("theta0")) g.theta0 = j["theta0"].get<std::vector<double>>();
  if (j.contains("theta1")) g.theta1 = j["theta1"].get<std::vector<double>>();
  if (j.contains("theta2")) g.theta2 = j["theta2"].get<std::vector<double>>();
  if (j.contains("theta3")) g.theta3 = j["theta3"].get<std::vector<double>>();
  if (j.contains("sigma_n2")) g.sigma_n2 = j["sigma_n2"].get<std::vector<double>>();
  return g;
}

// The normalized 72-month patterns that define the zones.
PatternMatrix zone_patterns(const Dataset& ds) {
  return normalize_rows(log_hec_patterns(ds));
}

// Zone labels + recomputed centroids/wss wrapped back into an assignment.
ZoneAssignment assignment_from_labels(const PatternMatrix& pm, const std::vector<int>& labels) {
  ZoneAssignment z;
  z.labels = labels;
  z.T = pm.T;
  z.k = 0;
  for (int l : labels) {
    if (l < 0) fail(errc::domain_violation, "negative zone label");
    z.k = std::max(z.k, l + 1);
  }
  z.wss = wss(pm, labels);
  std::vector<int> counts(z.k);
  z.centroids.assign(static_cast<std::size_t>(z.k) * pm.T, 0.0);
  kernels::label_means(pm.values.data(), pm.n, pm.T, labels.data(), z.k,
                       z.centroids.data(), counts.data());
  return z;
}

std::vector<double> mean_log_hec(const Dataset& ds) {
  std::vector<double> out(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    const auto p = log_hec_pattern(ds.records[i]);
    out[i] = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  }
  return out;
}

int cmd_synth(const Ctx& ctx, const std::string& config_arg, const std::string& out_name) {
  Timer timer;
  SynthConfig cfg =
      config_arg == "default" ? default_config() : config_from_json(read_text(config_arg));
  if (ctx.seed_given) cfg.seed = ctx.seed;

  const Dataset ds = generate(cfg);
  const fs::path data_path = ctx.out(out_name);
  write_dataset_csv(ds, data_path);

  const fs::path truth_path = ctx.out(fs::path(out_name).stem().string() + "_truth.csv");
  std::vector<std::string> ids(ds.size());
  for (int i = 0; i < ds.size(); ++i) ids[i] = ds.records[i].id;
  write_labels_csv(ids, *ds.labels, truth_path);

  const fs::path cfg_path = ctx.out("synth_config.json");
  csv::write_file(cfg_path, config_to_json(cfg));

  RunManifest m;
  m.subcommand = "synth";
  m.seed = cfg.seed;
  m.inputs = config_arg == "default" ? std::vector<std::string>{}
                                     : std::vector<std::string>{config_arg};
  m.parameters["config"] = config_arg;
  m.outputs = {data_path.string(), truth_path.string(), cfg_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << "wrote " << ds.size() << " block groups, " << ds.months << " months -> "
            << data_path.string() << "\n";
  return 0;
}

int cmd_ingest(const Ctx& ctx, const std::string& data) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const ValidationReport rep = validate(ds);

  json j;
  j["schema_version"] = "1";
  j["records"] = rep.records;
  j["months"] = ds.months;
  j["nonpositive_ec_months"] = rep.nonpositive_ec_months;
  j["phi_lt_pci_records"] = rep.phi_lt_pci_records;
  j["coord_violations"] = rep.coord_violations;
  j["clean"] = rep.clean();
  const fs::path out = ctx.out("validation.json");
  write_json(out, j);

  RunManifest m;
  m.subcommand = "ingest";
  m.inputs = {data};
  m.outputs = {out.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << rep.records << " records, " << ds.months << " months; "
            << (rep.clean() ? "clean" : "flags present") << "\n";
  return 0;
}

int cmd_cluster(const Ctx& ctx, const std::string& data, int k, int nstart, int max_iter,
                bool plus_plus) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const PatternMatrix pm = zone_patterns(ds);
  KmeansOptions opts;
  opts.nstart = nstart;
  opts.max_iter = max_iter;
  opts.seed = ctx.seed;
  opts.plus_plus = plus_plus;
  const ZoneAssignment z = kmeans(pm, k, opts);

  const fs::path labels_path = ctx.out("labels.csv");
  write_labels_csv(pm.ids, z.labels, labels_path);

  json j;
  j["schema_version"] = "1";
  j["k"] = z.k;
  j["wss"] = z.wss;
  j["seed"] = z.seed;
  j["nstart"] = nstart;
  json cents = json::array();
  for (int c = 0; c < z.k; ++c)
    cents.push_back(std::vector<double>(z.centroid(c), z.centroid(c) + z.T));
  j["centroids"] = cents;
  const fs::path summary_path = ctx.out("cluster_summary.json");
  write_json(summary_path, j);

  RunManifest m;
  m.subcommand = "cluster";
  m.seed = ctx.seed;
  m.inputs = {data};
  m.parameters = {{"k", std::to_string(k)},
                  {"nstart", std::to_string(nstart)},
                  {"max_iter", std::to_string(max_iter)},
                  {"kmeanspp", plus_plus ? "true" : "false"}};
  m.outputs = {labels_path.string(), summary_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << "k=" << k << " wss=" << z.wss << " -> " << labels_path.string() << "\n";
  return 0;
}

int cmd_stability(const Ctx& ctx, const std::string& data, const std::vector<int>& ks,
                  const std::vector<int>& nstarts, int runs) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const PatternMatrix pm = zone_patterns(ds);
  const StabilityTable table = stability_analysis(pm, ks, nstarts, runs, ctx.seed);

  // Wide layout: one row per k, one column per nstart, cells
  // "changed/total = pct%".
  std::ostringstream out;
  out << "k";
  for (int ns : nstarts) out << ",nstart=" << ns;
  out << "\n";
  for (int k : ks) {
    out << k;
    for (int ns : nstarts) {
      const auto& e = table.entries.at({k, ns});
      char cell[64];
      std::snprintf(cell, sizeof cell, "%d/%d = %.1f%%", e.changed, e.total,
                    100.0 * e.fraction);
      out << ',' << cell;
    }
    out << "\n";
  }
  const fs::path path = ctx.out("stability.csv");
  csv::write_file(path, out.str());
  std::cout << out.str();

  RunManifest m;
  m.subcommand = "stability";
  m.seed = ctx.seed;
  m.inputs = {data};
  m.parameters["runs"] = std::to_string(runs);
  m.outputs = {path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);
  return 0;
}

int cmd_diagnose(const Ctx& ctx, const std::string& data, const std::string& labels,
                 int max_pairs) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const PatternMatrix raw = log_hec_patterns(ds);
  const ZoneAssignment z =
      assignment_from_labels(zone_patterns(ds), read_labels_csv(ds, labels));
  const auto diags = zone_diagnostics(ds, raw, z, max_pairs, ctx.seed);

  std::ostringstream samples;
  samples << "zone,dist_miles,cov\n";
  for (const auto& d : diags)
    for (std::size_t i = 0; i < d.dist_samples.size(); ++i)
      samples << d.zone << ',' << csv::format_number(d.dist_samples[i]) << ','
              << csv::format_number(d.cov_samples[i]) << "\n";
  const fs::path samples_path = ctx.out("diagnostics_samples.csv");
  csv::write_file(samples_path, samples.str());

  json j;
  j["schema_version"] = "1";
  j["zones"] = json::array();
  for (const auto& d : diags) {
    json zj;
    zj["zone"] = d.zone;
    zj["pairs"] = d.dist_samples.size();
    zj["insufficient_samples"] = d.insufficient_samples;
    zj["dist"] = {{"mean", d.dist_moments.mean},
                  {"sd", d.dist_moments.sd},
                  {"skewness", d.dist_moments.skewness},
                  {"excess_kurtosis", d.dist_moments.excess_kurtosis},
                  {"jarque_bera", d.dist_jb}};
    zj["cov"] = {{"mean", d.cov_moments.mean},
                 {"sd", d.cov_moments.sd},
                 {"skewness", d.cov_moments.skewness},
                 {"excess_kurtosis", d.cov_moments.excess_kurtosis},
                 {"jarque_bera", d.cov_jb}};
    zj["joint_cov"] = {d.joint_cov[0], d.joint_cov[1], d.joint_cov[2], d.joint_cov[3]};
    j["zones"].push_back(zj);
  }
  const fs::path summary_path = ctx.out("diagnostics_summary.json");
  write_json(summary_path, j);

  RunManifest m;
  m.subcommand = "diagnose";
  m.seed = ctx.seed;
  m.inputs = {data, labels};
  m.parameters["max_pairs"] = std::to_string(max_pairs);
  m.outputs = {samples_path.string(), summary_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  for (const auto& d : diags)
    std::cout << "zone " << d.zone << ": dist JB=" << d.dist_jb << " cov JB=" << d.cov_jb
              << "\n";
  return 0;
}

int cmd_pca(const Ctx& ctx, const std::string& data, const std::string& labels) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const PatternMatrix avg = monthly_average_rows(log_hec_patterns(ds));
  std::vector<int> zl(ds.size(), 0);
  int k = 1;
  if (!labels.empty()) {
    zl = read_labels_csv(ds, labels);
    for (int l : zl) k = std::max(k, l + 1);
  }

  std::ostringstream out;
  out << "zone,component,eigenvalue,explained";
  for (int t = 1; t <= 12; ++t) out << ",m" << t;
  out << "\n";
  json j;
  j["schema_version"] = "1";
  j["zones"] = json::array();
  for (int c = 0; c < k; ++c) {
    std::vector<double> rows;
    for (int i = 0; i < avg.n; ++i)
      if (zl[i] == c) rows.insert(rows.end(), avg.row(i), avg.row(i) + 12);
    const int nc = static_cast<int>(rows.size()) / 12;
    if (nc < 2) fail(errc::empty_zone, "zone " + std::to_string(c) + " has fewer than 2 rows");
    const PCAResult p = pca(rows, nc, 12);
    for (int comp = 0; comp < 12; ++comp) {
      out << c << ',' << comp << ',' << csv::format_number(p.eigenvalues[comp]) << ','
          << csv::format_number(p.explained[comp]);
      for (int t = 0; t < 12; ++t) out << ',' << csv::format_number(p.component(comp)[t]);
      out << "\n";
    }
    const double nc_score = near_constant_check(p);
    j["zones"].push_back({{"zone", c},
                          {"n", nc},
                          {"explained_first", p.explained[0]},
                          {"near_constant", nc_score},
                          {"scale_shift_regime", nc_score >= kScaleShiftThreshold}});
  }
  const fs::path csv_path = ctx.out("pca_components.csv");
  csv::write_file(csv_path, out.str());
  const fs::path json_path = ctx.out("pca_summary.json");
  write_json(json_path, j);

  RunManifest m;
  m.subcommand = "pca";
  m.inputs = {data};
  if (!labels.empty()) m.inputs.push_back(labels);
  m.outputs = {csv_path.string(), json_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << j["zones"].dump(2) << "\n";
  return 0;
}

int cmd_regress(const Ctx& ctx, const std::string& data, const std::string& labels,
                const std::string& covariate) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const ZoneAssignment z =
      assignment_from_labels(zone_patterns(ds), read_labels_csv(ds, labels));
  const IncomeCovariate cov =
      covariate == "pci" ? IncomeCovariate::pci : IncomeCovariate::phi;
  const ClusteredRegression cr = clustered_regression(ds, z, cov);

  json j;
  j["schema_version"] = "1";
  j["covariate"] = covariate;
  j["pooled"] = regression_json(cr.pooled);
  j["zones"] = json::array();
  for (int c = 0; c < z.k; ++c) {
    json zj = regression_json(cr.zones[c]);
    zj["zone"] = c;
    j["zones"].push_back(zj);
  }
  const fs::path path = ctx.out("regression.json");
  write_json(path, j);

  RunManifest m;
  m.subcommand = "regress";
  m.inputs = {data, labels};
  m.parameters["covariate"] = covariate;
  m.outputs = {path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::printf("pooled: slope %.3f intercept %.3f R2 %.3f\n", cr.pooled.slope,
              cr.pooled.intercept, cr.pooled.r2);
  for (int c = 0; c < z.k; ++c)
    std::printf("zone %d: slope %.3f intercept %.3f R2 %.3f\n", c, cr.zones[c].slope,
                cr.zones[c].intercept, cr.zones[c].r2);
  return 0;
}

int cmd_gp(const Ctx& ctx, const std::string& data, const std::string& zones_path,
           const std::string& grid_spec, int curve_points) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const ZoneAssignment z =
      assignment_from_labels(zone_patterns(ds), read_labels_csv(ds, zones_path));
  const GridSpec grid = parse_grid(grid_spec);
  const auto fits = clustered_gp_regression(ds, z, grid, curve_points);

  json j;
  j["schema_version"] = "1";
  j["zones"] = json::array();
  for (const auto& f : fits)
    j["zones"].push_back({{"zone", f.zone},
                          {"n", f.model.n()},
                          {"params", params_json(f.model.params)},
                          {"log_marginal_likelihood", f.model.log_marginal}});
  const fs::path json_path = ctx.out("gp_models.json");
  write_json(json_path, j);

  std::ostringstream curve;
  curve << "zone,log10_phi,mean,lo,hi\n";
  for (const auto& f : fits)
    for (const auto& p : f.curve)
      curve << f.zone << ',' << csv::format_number(p.x) << ',' << csv::format_number(p.mean)
            << ',' << csv::format_number(p.lo) << ',' << csv::format_number(p.hi) << "\n";
  const fs::path curve_path = ctx.out("gp_curves.csv");
  csv::write_file(curve_path, curve.str());

  const fs::path svg_path = ctx.out("gp_curves.svg");
  csv::write_file(svg_path, render_gp_curves(fits));

  RunManifest m;
  m.subcommand = "gp";
  m.seed = ctx.seed;
  m.inputs = {data, zones_path};
  m.parameters = {{"grid", grid_spec}, {"curve_points", std::to_string(curve_points)}};
  m.outputs = {json_path.string(), curve_path.string(), svg_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  for (const auto& f : fits)
    std::printf("zone %d: lml %.2f theta0 %.4g theta1 %.4g sigma_n2 %.4g\n", f.zone,
                f.model.log_marginal, f.model.params.theta0, f.model.params.theta1,
                f.model.params.sigma_n2);
  return 0;
}

int cmd_mixreg(const Ctx& ctx, const std::string& data, int k, int restarts,
               const std::string& covariate) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  std::vector<double> x(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    x[i] = std::log10(covariate == "pci" ? rec.pci : rec.phi);
  }
  const std::vector<double> y = mean_log_hec(ds);
  const MixtureRegressionModel m = mixture_regression_em(x, y, k, restarts, ctx.seed);

  json j;
  j["schema_version"] = "1";
  j["k"] = k;
  j["covariate"] = covariate;
  j["log_likelihood"] = m.log_likelihood;
  j["iterations"] = m.iterations;
  j["experts"] = json::array();
  for (const auto& e : m.experts)
    j["experts"].push_back({{"slope", e.slope},
                            {"intercept", e.intercept},
                            {"noise_sd", e.noise_sd},
                            {"weight", e.weight}});
  const fs::path path = ctx.out("mixreg.json");
  write_json(path, j);

  RunManifest man;
  man.subcommand = "mixreg";
  man.seed = ctx.seed;
  man.inputs = {data};
  man.parameters = {{"k", std::to_string(k)},
                    {"restarts", std::to_string(restarts)},
                    {"covariate", covariate}};
  man.outputs = {path.string()};
  man.wall_ms = timer.ms();
  write_manifest(man, ctx.out_dir);

  for (const auto& e : m.experts)
    std::printf("expert: slope %.3f intercept %.3f sd %.4f weight %.3f\n", e.slope,
                e.intercept, e.noise_sd, e.weight);
  return 0;
}

int cmd_kde(const Ctx& ctx, const std::string& data, const std::string& labels,
            const std::string& variable, const std::string& weight_kind, double bandwidth,
            int grid_points) {
  Timer timer;
  const Dataset ds = parse_dataset(data);

  std::vector<double> values(ds.size());
  if (variable == "phi") {
    for (int i = 0; i < ds.size(); ++i) values[i] = std::log10(ds.records[i].phi);
  } else {
    values = mean_log_hec(ds);
  }
  std::vector<double> weights(ds.size(), 1.0);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    if (weight_kind == "households")
      weights[i] = std::accumulate(rec.households.begin(), rec.households.end(), 0.0) /
                   rec.households.size();
    else if (weight_kind == "population")
      weights[i] = rec.population;
  }

  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(values, weights);
  const std::vector<double> grid = kde_grid(values, h, grid_points);

  std::vector<DensityCurve> curves;
  std::vector<std::string> names;
  curves.push_back(kde(values, weights, h, grid));
  names.push_back("all");

  if (!labels.empty()) {
    const auto zl = read_labels_csv(ds, labels);
    int k = 0;
    for (int l : zl) k = std::max(k, l + 1);
    for (int c = 0; c < k; ++c) {
      std::vector<double> v, w;
      for (int i = 0; i < ds.size(); ++i)
        if (zl[i] == c) {
          v.push_back(values[i]);
          w.push_back(weights[i]);
        }
      if (v.size() < 2) fail(errc::empty_zone, "zone " + std::to_string(c));
      curves.push_back(kde(v, w, h, grid));
      names.push_back("zone " + std::to_string(c));
    }
  }

  std::ostringstream out;
  out << "series,x,density\n";
  for (std::size_t s = 0; s < curves.size(); ++s)
    for (std::size_t i = 0; i < grid.size(); ++i)
      out << names[s] << ',' << csv::format_number(grid[i]) << ','
          << csv::format_number(curves[s].density[i]) << "\n";
  const fs::path csv_path = ctx.out("kde.csv");
  csv::write_file(csv_path, out.str());
  const fs::path svg_path = ctx.out("kde.svg");
  csv::write_file(svg_path, render_density_curves(curves, names));

  RunManifest m;
  m.subcommand = "kde";
  m.inputs = {data};
  if (!labels.empty()) m.inputs.push_back(labels);
  m.parameters = {{"variable", variable},
                  {"weight", weight_kind},
                  {"bandwidth", csv::format_number(h)},
                  {"grid_points", std::to_string(grid_points)}};
  m.outputs = {csv_path.string(), svg_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << "bandwidth " << h << " -> " << csv_path.string() << "\n";
  return 0;
}

int cmd_cec_eval(const Ctx& ctx, const CECCovariates& cov) {
  Timer timer;
  const double v = cec_model_eval(cov);
  json j;
  j["schema_version"] = "1";
  j["inputs"] = {{"pph", cov.pph},           {"pci", cov.pci},
                 {"unemp_rate", cov.unemp_rate}, {"res_elec_rate", cov.res_elec_rate},
                 {"cool_days", cov.cool_days},   {"heat_days", cov.heat_days},
                 {"ladwp", cov.ladwp}};
  j["ln_hec"] = v;
  const fs::path path = ctx.out("cec_eval.json");
  write_json(path, j);

  RunManifest m;
  m.subcommand = "cec-eval";
  m.outputs = {path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::printf("ln(HEC) = %.6f\n", v);
  return 0;
}

int cmd_report(const Ctx& ctx, const std::string& data, const std::string& labels) {
  Timer timer;
  const Dataset ds = parse_dataset(data);
  const PatternMatrix pm = zone_patterns(ds);
  const ZoneAssignment z = assignment_from_labels(pm, read_labels_csv(ds, labels));

  const fs::path map_path = ctx.out("scatter_map.svg");
  csv::write_file(map_path, render_scatter_map(ds, z.labels, z.k));

  const Dendrogram dendro = hierarchical_order(pm);
  const fs::path heat_path = ctx.out("heatmap.svg");
  csv::write_file(heat_path, render_heatmap(pm, dendro.leaf_order));

  const PatternMatrix raw = log_hec_patterns(ds);
  const auto cycles = zone_annual_cycle(raw, z);
  const fs::path cycles_path = ctx.out("zone_cycles.svg");
  csv::write_file(cycles_path, render_cycles(cycles));

  const fs::path patterns_path = ctx.out("patterns.csv");
  write_pattern_csv(pm, patterns_path);

  RunManifest m;
  m.subcommand = "report";
  m.inputs = {data, labels};
  m.outputs = {map_path.string(), heat_path.string(), cycles_path.string(),
               patterns_path.string()};
  m.wall_ms = timer.ms();
  write_manifest(m, ctx.out_dir);

  std::cout << "report -> " << ctx.out_dir << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"EC-microclimate zones: infer geographic zones from household "
               "electricity-consumption patterns and fit per-zone models"};
  app.require_subcommand(1);
  app.fallthrough();

  Ctx ctx;
  auto* seed_opt = app.add_option("--seed", ctx.seed, "RNG seed for all randomness");
  app.add_option("--out-dir", ctx.out_dir, "output directory (default .)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_config = "default";
  std::string synth_out = "data.csv";
  synth->add_option("--config", synth_config, "config JSON path or 'default'");
  synth->add_option("--out", synth_out, "output CSV name");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse and validate a dataset");
  std::string ingest_data;
  ingest->add_option("--data", ingest_data, "dataset CSV")->required();

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means zone inference");
  std::string cluster_data;
  int cluster_k = 3, cluster_nstart = 25, cluster_max_iter = 100;
  bool cluster_pp = false;
  cluster->add_option("--data", cluster_data, "dataset CSV")->required();
  cluster->add_option("--k", cluster_k, "number of zones");
  cluster->add_option("--nstart", cluster_nstart, "random restarts");
  cluster->add_option("--max-iter", cluster_max_iter, "Lloyd iteration cap");
  cluster->add_flag("--kmeanspp", cluster_pp, "k-means++ seeding");

  // stability
  auto* stability = app.add_subcommand("stability", "assignment stability across (k, nstart)");
  std::string stability_data;
  std::vector<int> stability_ks{2, 3, 4, 5, 6};
  std::vector<int> stability_nstarts{10, 25, 50};
  int stability_runs = 10;
  stability->add_option("--data", stability_data, "dataset CSV")->required();
  stability->add_option("--ks", stability_ks, "zone counts to test");
  stability->add_option("--nstarts", stability_nstarts, "restart counts to test");
  stability->add_option("--runs", stability_runs, "independent fits per cell");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "per-zone distance/covariance diagnostics");
  std::string diag_data, diag_labels;
  int diag_max_pairs = 100000;
  diagnose->add_option("--data", diag_data, "dataset CSV")->required();
  diagnose->add_option("--labels", diag_labels, "zone labels CSV")->required();
  diagnose->add_option("--max-pairs", diag_max_pairs, "pair sample cap per zone");

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "per-zone PCA of 12 monthly averages");
  std::string pca_data, pca_labels;
  pca_cmd->add_option("--data", pca_data, "dataset CSV")->required();
  pca_cmd->add_option("--labels", pca_labels, "zone labels CSV (omit for pooled)");

  // regress
  auto* regress = app.add_subcommand("regress", "pooled and per-zone income regression");
  std::string reg_data, reg_labels, reg_covariate = "phi";
  regress->add_option("--data", reg_data, "dataset CSV")->required();
  regress->add_option("--labels", reg_labels, "zone labels CSV")->required();
  regress->add_option("--covariate", reg_covariate, "phi or pci")
      ->check(CLI::IsMember({"phi", "pci"}));

  // gp
  auto* gp_cmd = app.add_subcommand("gp", "per-zone GP regression with error bands");
  std::string gp_data, gp_zones, gp_grid = "default";
  int gp_curve_points = 100;
  gp_cmd->add_option("--data", gp_data, "dataset CSV")->required();
  gp_cmd->add_option("--zones", gp_zones, "zone labels CSV")->required();
  gp_cmd->add_option("--grid", gp_grid, "grid spec JSON path or 'default'");
  gp_cmd->add_option("--curve-points", gp_curve_points, "points on the prediction curve");

  // mixreg
  auto* mixreg = app.add_subcommand("mixreg", "EM mixture of linear regressions");
  std::string mix_data, mix_covariate = "phi";
  int mix_k = 3, mix_restarts = 8;
  mixreg->add_option("--data", mix_data, "dataset CSV")->required();
  mixreg->add_option("--k", mix_k, "number of experts");
  mixreg->add_option("--restarts", mix_restarts, "EM restarts");
  mixreg->add_option("--covariate", mix_covariate, "phi or pci")
      ->check(CLI::IsMember({"phi", "pci"}));

  // kde
  auto* kde_cmd = app.add_subcommand("kde", "weighted density estimates");
  std::string kde_data, kde_labels, kde_variable = "hec", kde_weight = "households";
  double kde_bandwidth = 0.0;
  int kde_grid_points = 256;
  kde_cmd->add_option("--data", kde_data, "dataset CSV")->required();
  kde_cmd->add_option("--labels", kde_labels, "zone labels CSV for per-zone curves");
  kde_cmd->add_option("--variable", kde_variable, "hec or phi")
      ->check(CLI::IsMember({"hec", "phi"}));
  kde_cmd->add_option("--weight", kde_weight, "households, population or none")
      ->check(CLI::IsMember({"households", "population", "none"}));
  kde_cmd->add_option("--bandwidth", kde_bandwidth, "kernel bandwidth (default Silverman)");
  kde_cmd->add_option("--grid-points", kde_grid_points, "evaluation grid size");

  // cec-eval
  auto* cec = app.add_subcommand("cec-eval", "statewide econometric baseline");
  CECCovariates cov;
  cec->add_option("--pph", cov.pph, "persons per household")->required();
  cec->add_option("--pci", cov.pci, "per-capita income, $")->required();
  cec->add_option("--unemp-rate", cov.unemp_rate, "unemployment rate, percent")->required();
  cec->add_option("--res-elec-rate", cov.res_elec_rate, "electricity rate, cents/kWh")
      ->required();
  cec->add_option("--cool-days", cov.cool_days, "cooling degree days")->required();
  cec->add_option("--heat-days", cov.heat_days, "heating degree days")->required();
  cec->add_option("--ladwp", cov.ladwp, "LADWP service-area indicator (0/1)")->required();

  // report
  auto* report = app.add_subcommand("report", "scatter map, heatmap and zone cycles");
  std::string report_data, report_labels;
  report->add_option("--data", report_data, "dataset CSV")->required();
  report->add_option("--labels", report_labels, "zone labels CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }
  ctx.seed_given = seed_opt->count() > 0;

  try {
    if (synth->parsed()) return cmd_synth(ctx, synth_config, synth_out);
    if (ingest->parsed()) return cmd_ingest(ctx, ingest_data);
    if (cluster->parsed())
      return cmd_cluster(ctx, cluster_data, cluster_k, cluster_nstart, cluster_max_iter,
                         cluster_pp);
    if (stability->parsed())
      return cmd_stability(ctx, stability_data, stability_ks, stability_nstarts,
                           stability_runs);
    if (diagnose->parsed()) return cmd_diagnose(ctx, diag_data, diag_labels, diag_max_pairs);
    if (pca_cmd->parsed()) return cmd_pca(ctx, pca_data, pca_labels);
    if (regress->parsed()) return cmd_regress(ctx, reg_data, reg_labels, reg_covariate);
    if (gp_cmd->parsed()) return cmd_gp(ctx, gp_data, gp_zones, gp_grid, gp_curve_points);
    if (mixreg->parsed()) return cmd_mixreg(ctx, mix_data, mix_k, mix_restarts, mix_covariate);
    if (kde_cmd->parsed())
      return cmd_kde(ctx, kde_data, kde_labels, kde_variable, kde_weight, kde_bandwidth,
                     kde_grid_points);
    if (cec->parsed()) return cmd_cec_eval(ctx, cov);
    if (report->parsed()) return cmd_report(ctx, report_data, report_labels);
  } catch (const Error& e) {
    std::cerr << "ecz: " << e.what() << "\n";
    return e.code() == errc::usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "ecz: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ecz
