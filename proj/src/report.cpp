#include "ecz/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ecz/csv.hpp"

namespace ecz {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Zone palette; cycles past eight zones.
const char* kZoneColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* zone_color(int z) { return kZoneColors[z % 8]; }

// Blue-to-red ramp for heatmap cells.
std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + t * (220 - 40)));
  const int g = static_cast<int>(std::lround(60 + (1.0 - std::abs(2.0 * t - 1.0)) * 60));
  const int b = static_cast<int>(std::lround(220 - t * (220 - 40)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

struct SvgDoc {
  std::ostringstream out;
  SvgDoc(double w, double h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
        << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& color) {
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" fill=\"" << color << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& color) {
    out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"" << fmt(r)
        << "\" fill=\"" << color << "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(width)
        << "\" points=\"";
    for (const auto& [x, y] : pts) out << fmt(x) << ',' << fmt(y) << ' ';
    out << "\"/>\n";
  }
  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& color,
               double opacity) {
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"" << fmt(opacity)
        << "\" points=\"";
    for (const auto& [x, y] : pts) out << fmt(x) << ',' << fmt(y) << ' ';
    out << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 12) {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" "
        << "font-size=\"" << size << "\" fill=\"#333333\">" << s << "</text>\n";
  }
  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

}  // namespace

std::string render_heatmap(const PatternMatrix& pm, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != pm.n)
    fail(errc::length_mismatch, "order length vs rows");
  std::vector<bool> seen(pm.n, false);
  for (int i : order) {
    if (i < 0 || i >= pm.n || seen[i]) fail(errc::domain_violation, "order is not a permutation");
    seen[i] = true;
  }

  double lo = pm.values.empty() ? 0.0 : pm.values[0], hi = lo;
  for (double v : pm.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi - lo;

  const double cell_w = std::max(1.0, 720.0 / std::max(1, pm.T));
  const double cell_h = std::max(1.0, 640.0 / std::max(1, pm.n));
  const double margin = 10.0;
  SvgDoc doc(margin * 2 + cell_w * pm.T, margin * 2 + cell_h * pm.n);
  for (int r = 0; r < pm.n; ++r) {
    const double* row = pm.row(order[r]);
    for (int t = 0; t < pm.T; ++t) {
      const double v = range > 0.0 ? (row[t] - lo) / range : 0.5;
      doc.rect(margin + t * cell_w, margin + r * cell_h, cell_w, cell_h, ramp_color(v));
    }
  }
  return doc.finish();
}

std::string render_scatter_map(const Dataset& ds, const std::vector<int>& labels, int k) {
  if (ds.size() != static_cast<int>(labels.size()))
    fail(errc::length_mismatch, "dataset vs labels");
  double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0;
  for (const auto& r : ds.records) {
    lat_lo = std::min(lat_lo, r.lat);
    lat_hi = std::max(lat_hi, r.lat);
    lon_lo = std::min(lon_lo, r.lon);
    lon_hi = std::max(lon_hi, r.lon);
  }
  const double pad_lat = std::max(1e-6, (lat_hi - lat_lo) * 0.05);
  const double pad_lon = std::max(1e-6, (lon_hi - lon_lo) * 0.05);
  lat_lo -= pad_lat;
  lat_hi += pad_lat;
  lon_lo -= pad_lon;
  lon_hi += pad_lon;

  const double W = 720.0, H = 600.0, margin = 30.0;
  SvgDoc doc(W, H);
  for (int i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    const double x = margin + (r.lon - lon_lo) / (lon_hi - lon_lo) * (W - 2 * margin);
    const double y = H - margin - (r.lat - lat_lo) / (lat_hi - lat_lo) * (H - 2 * margin);
    doc.circle(x, y, 2.5, zone_color(labels[i]));
  }
  for (int z = 0; z < k; ++z) {
    doc.circle(margin, 16.0 + 16.0 * z, 5.0, zone_color(z));
    doc.text(margin + 10.0, 20.0 + 16.0 * z, "zone " + std::to_string(z));
  }
  return doc.finish();
}

namespace {

struct Frame {
  double W = 720.0, H = 440.0, margin = 46.0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  double px(double x) const { return margin + (x - x_lo) / (x_hi - x_lo) * (W - 2 * margin); }
  double py(double y) const {
    return H - margin - (y - y_lo) / (y_hi - y_lo) * (H - 2 * margin);
  }
  void stretch(double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
};

}  // namespace

std::string render_cycles(const std::vector<std::vector<double>>& cycles) {
  Frame f;
  f.x_lo = 1.0;
  f.x_hi = 12.0;
  f.y_lo = cycles.at(0).at(0);
  f.y_hi = f.y_lo;
  for (const auto& c : cycles)
    for (double v : c) {
      f.y_lo = std::min(f.y_lo, v);
      f.y_hi = std::max(f.y_hi, v);
    }
  const double pad = std::max(1e-9, (f.y_hi - f.y_lo) * 0.08);
  f.y_lo -= pad;
  f.y_hi += pad;

  SvgDoc doc(f.W, f.H);
  for (std::size_t z = 0; z < cycles.size(); ++z) {
    std::vector<std::pair<double, double>> pts;
    for (int m = 0; m < 12; ++m) pts.emplace_back(f.px(m + 1.0), f.py(cycles[z][m]));
    doc.polyline(pts, zone_color(static_cast<int>(z)), 2.0);
    doc.text(f.margin + 80.0 * z, 18.0, "zone " + std::to_string(z));
  }
  doc.text(f.W / 2 - 20.0, f.H - 8.0, "month");
  return doc.finish();
}

std::string render_gp_curves(const std::vector<ZoneGPRegression>& zones) {
  Frame f;
  bool first = true;
  for (const auto& z : zones)
    for (const auto& p : z.curve) {
      if (first) {
        f.x_lo = f.x_hi = p.x;
        f.y_lo = p.lo;
        f.y_hi = p.hi;
        first = false;
      }
      f.stretch(p.x, p.lo);
      f.stretch(p.x, p.hi);
    }

  SvgDoc doc(f.W, f.H);
  for (const auto& z : zones) {
    std::vector<std::pair<double, double>> band;
    for (const auto& p : z.curve) band.emplace_back(f.px(p.x), f.py(p.hi));
    for (auto it = z.curve.rbegin(); it != z.curve.rend(); ++it)
      band.emplace_back(f.px(it->x), f.py(it->lo));
    doc.polygon(band, zone_color(z.zone), 0.18);
    std::vector<std::pair<double, double>> line;
    for (const auto& p : z.curve) line.emplace_back(f.px(p.x), f.py(p.mean));
    doc.polyline(line, zone_color(z.zone), 2.0);
    doc.text(f.margin + 80.0 * z.zone, 18.0, "zone " + std::to_string(z.zone));
  }
  doc.text(f.W / 2 - 60.0, f.H - 8.0, "log10 household income");
  return doc.finish();
}

std::string render_density_curves(const std::vector<DensityCurve>& curves,
                                  const std::vector<std::string>& names) {
  if (curves.size() != names.size()) fail(errc::length_mismatch, "curves vs names");
  Frame f;
  bool first = true;
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (first) {
        f.x_lo = f.x_hi = c.x[i];
        f.y_lo = 0.0;
        f.y_hi = c.density[i];
        first = false;
      }
      f.stretch(c.x[i], c.density[i]);
    }

  SvgDoc doc(f.W, f.H);
  for (std::size_t z = 0; z < curves.size(); ++z) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < curves[z].x.size(); ++i)
      pts.emplace_back(f.px(curves[z].x[i]), f.py(curves[z].density[i]));
    doc.polyline(pts, zone_color(static_cast<int>(z)), 2.0);
    doc.text(f.margin + 110.0 * z, 18.0, names[z]);
  }
  return doc.finish();
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["tool_version"] = m.tool_version;
  j["subcommand"] = m.subcommand;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["wall_ms"] = m.wall_ms;

  const auto tmp = dir / "manifest.json.tmp";
  const auto final_path = dir / "manifest.json";
  csv::write_file(tmp, j.dump(2) + "\n");
  std::filesystem::rename(tmp, final_path);
}

}  // namespace ecz
