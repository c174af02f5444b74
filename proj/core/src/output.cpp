#include "bbeig/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <limits>

#include "bbeig/error.hpp"

#ifndef BBEIG_VERSION
#define BBEIG_VERSION "0.0.0"
#endif

namespace bbeig {
namespace {

using Json = nlohmann::ordered_json;

Json metadata_json(const Metadata& m) {
  Json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["config_hash"] = m.config_hash;
  Json t = Json::object();
  for (const auto& [k, v] : m.tolerances) t[k] = v;
  j["tolerances"] = t;
  return j;
}

// Non-finite values have no JSON literal; they become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Column {
  const char* name;
  std::function<std::string(const AsymptoticRecord&)> get;
  std::function<void(AsymptoticRecord&, const std::string&)> set;
};

double read_number(const std::string& s) {
  if (s.empty()) return 0.0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw IoError("malformed number '" + s + "' in records table");
  return v;
}

#define BBEIG_COL(field)                                                                       \
  Column {                                                                                     \
    #field, [](const AsymptoticRecord& r) { return csv_number(r.field); },                    \
        [](AsymptoticRecord& r, const std::string& s) { r.field = read_number(s); }            \
  }

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      BBEIG_COL(eps),
      BBEIG_COL(k),
      BBEIG_COL(beta),
      BBEIG_COL(h),
      Column{"center_x", [](const AsymptoticRecord& r) { return csv_number(r.center[0]); },
             [](AsymptoticRecord& r, const std::string& s) { r.center[0] = read_number(s); }},
      Column{"center_y", [](const AsymptoticRecord& r) { return csv_number(r.center[1]); },
             [](AsymptoticRecord& r, const std::string& s) { r.center[1] = read_number(s); }},
      BBEIG_COL(lambda),
      BBEIG_COL(lambda_tilde),
      BBEIG_COL(lambda1),
      BBEIG_COL(lambda0_h),
      BBEIG_COL(gap),
      BBEIG_COL(discretization_margin),
      BBEIG_COL(dist),
      BBEIG_COL(dist_over_k),
      BBEIG_COL(psi_tilde),
      BBEIG_COL(psi_tilde_h),
      BBEIG_COL(correction),
      BBEIG_COL(predicted),
      BBEIG_COL(ratio),
      BBEIG_COL(ratio_h),
      BBEIG_COL(blowup_l2_gap),
      BBEIG_COL(blowup_l2_gap_h),
      BBEIG_COL(blowup_l2_floor),
      BBEIG_COL(blowup_l2_norm),
      BBEIG_COL(phi_norm),
      BBEIG_COL(phi_laplacian_norm),
      BBEIG_COL(route_gap),
      Column{"evaluations", [](const AsymptoticRecord& r) { return std::to_string(r.evaluations); },
             [](AsymptoticRecord& r, const std::string& s) { r.evaluations = s.empty() ? 0 : std::stoi(s); }},
      Column{"error", [](const AsymptoticRecord& r) { return r.error; },
             [](AsymptoticRecord& r, const std::string& s) { r.error = s; }},
  };
  return cols;
}

#undef BBEIG_COL

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string svg_metadata(const Metadata& m) {
  std::string s = "<metadata>command=" + xml_escape(m.command) + "; version=" + xml_escape(m.version) +
                  "; config_hash=" + m.config_hash;
  for (const auto& [k, v] : m.tolerances) s += "; " + xml_escape(k) + "=" + xml_escape(v);
  if (m.timestamp) s += "; timestamp=" + xml_escape(*m.timestamp);
  return s + "</metadata>\n";
}

// Round axis ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 5) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string version_string() { return BBEIG_VERSION; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(echo(config))));
  return buf;
}

Metadata make_metadata(const RunConfig& config, const std::string& command) {
  Metadata m;
  m.command = command;
  m.version = version_string();
  m.config_hash = config_hash(config);
  m.tolerances = {{"ritz_tolerance", format_double(config.ritz_tolerance)},
                  {"cg_tolerance", format_double(config.cg_tolerance)},
                  {"krylov_dimension", std::to_string(config.krylov_dimension)},
                  {"subsamples", std::to_string(config.subsamples)}};
  if (config.timestamp) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
  }
  return m;
}

void ensure_writable(const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create output directory '" + directory + "': " + ec.message());
  const fs::path probe = fs::path(directory) / ".bbeig-write-probe";
  {
    std::ofstream f(probe);
    if (!f || !(f << "probe")) throw IoError("output directory '" + directory + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const CsvTable& table, const Metadata& meta) {
  std::string out;
  out += "# command: " + meta.command + "\n";
  out += "# version: " + meta.version + "\n";
  out += "# config_hash: " + meta.config_hash + "\n";
  for (const auto& [k, v] : meta.tolerances) out += "# " + k + ": " + v + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += "\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, at_line_start = true, comment = false;
  std::size_t i = 0;
  auto end_row = [&] {
    row.push_back(cell);
    cell.clear();
    lines.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (at_line_start && !quoted) {
      comment = c == '#' && lines.empty();
      at_line_start = false;
    }
    if (comment) {
      if (c == '\n') at_line_start = true;
      ++i;
      continue;
    }
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(cell);
      cell.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
      at_line_start = true;
    } else {
      cell += c;
    }
    ++i;
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (!cell.empty() || !row.empty()) end_row();
  CsvTable t;
  if (lines.empty()) return t;
  t.header = lines.front();
  t.rows.assign(lines.begin() + 1, lines.end());
  return t;
}

CsvTable records_table(const std::vector<AsymptoticRecord>& records) {
  CsvTable t;
  for (const auto& c : columns()) t.header.emplace_back(c.name);
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (const auto& c : columns()) row.push_back(c.get(r));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable distance_table(const GridDomain& domain) {
  CsvTable t;
  t.header = {"x", "y", "d"};
  const auto& grid = domain.grid();
  for (int idx = 0; idx < static_cast<int>(grid.node_count()); ++idx) {
    const Point p = grid.node(idx);
    t.rows.push_back({csv_number(p[0]), csv_number(grid.dimension == 1 ? 0.0 : p[1]), csv_number(domain.dist()[idx])});
  }
  return t;
}

std::vector<AsymptoticRecord> records_from_table(const CsvTable& table) {
  std::vector<const Column*> map;
  for (const auto& name : table.header) {
    const auto& cols = columns();
    const auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& c) { return name == c.name; });
    if (it == cols.end()) throw IoError("unknown records column '" + name + "'");
    map.push_back(&*it);
  }
  std::vector<AsymptoticRecord> out;
  for (const auto& row : table.rows) {
    if (row.size() != map.size()) throw IoError("records row has the wrong number of fields");
    AsymptoticRecord r;
    for (std::size_t i = 0; i < row.size(); ++i) map[i]->set(r, row[i]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string limit_json(const LimitSolution& sol, const Metadata& meta) {
  Json j;
  j["metadata"] = metadata_json(meta);
  j["dimension"] = sol.params.dimension;
  j["m_bar"] = sol.params.m_bar;
  j["m_under"] = sol.params.m_under;
  j["rho"] = sol.rho();
  j["nu"] = sol.nu.value();
  j["lambda0"] = number(sol.lambda0);
  j["A"] = number(sol.A);
  j["B"] = number(sol.B);
  j["inner_rate"] = number(sol.inner_rate());
  j["decay_rate"] = number(sol.decay_rate());
  j["gamma"] = number(sol.gamma);
  j["Phi"] = number(sol.phi);
  return j.dump(2) + "\n";
}

std::string eigen_json(const EigenSummary& s, const Metadata& meta) {
  Json j;
  j["metadata"] = metadata_json(meta);
  j["shape"] = s.shape;
  j["eps"] = s.eps;
  j["h"] = s.h;
  j["unknowns"] = s.unknowns;
  j["center"] = {s.center[0], s.center[1]};
  j["dist"] = number(s.dist);
  j["lambda"] = number(s.lambda);
  j["lambda_tilde"] = number(s.lambda_tilde);
  j["residual"] = number(s.residual);
  j["lanczos_iterations"] = s.iterations;
  j["evaluations"] = s.evaluations;
  j["accepted_moves"] = s.accepted_moves;
  return j.dump(2) + "\n";
}

namespace {

Json checks_array(const std::vector<PropertyCheck>& checks) {
  Json a = Json::array();
  for (const auto& c : checks) {
    Json o;
    o["name"] = c.name;
    o["passed"] = c.passed;
    o["detail"] = c.detail;
    a.push_back(o);
  }
  return a;
}

}  // namespace

std::string sweep_json(const std::vector<AsymptoticRecord>& records, const ExpansionReport& report,
                       const LimitSolution& sol, const std::vector<PropertyCheck>& checks, const Metadata& meta) {
  Json j;
  j["metadata"] = metadata_json(meta);
  Json lim;
  lim["lambda0"] = number(sol.lambda0);
  lim["decay_rate"] = number(sol.decay_rate());
  lim["gamma"] = number(sol.gamma);
  lim["Phi"] = number(sol.phi);
  j["limit"] = lim;
  Json rows = Json::array();
  for (const auto& r : records) {
    Json o;
    const auto table = records_table({r});
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      const std::string& name = table.header[i];
      const std::string& v = table.rows[0][i];
      if (name == "error") {
        o[name] = v;
      } else if (name == "evaluations") {
        o[name] = r.evaluations;
      } else {
        o[name] = number(read_number(v));
      }
    }
    rows.push_back(o);
  }
  j["records"] = rows;
  Json rep;
  rep["fit_points"] = report.fit.points;
  rep["fit_slope"] = number(report.fit.slope);
  rep["fit_intercept"] = number(report.fit.intercept);
  rep["rate"] = number(report.rate);
  rep["rate_reference"] = number(report.rate_reference);
  rep["rate_vs_reference"] = number(report.rate_vs_reference);
  rep["psi_tilde_last"] = number(report.psi_tilde_last);
  rep["rate_vs_psi"] = number(report.rate_vs_psi);
  Json ratios = Json::array();
  for (std::size_t i = 0; i < report.ratio.size(); ++i) {
    Json o;
    o["eps"] = report.eps[i];
    o["ratio"] = number(report.ratio[i]);
    o["used"] = static_cast<bool>(report.used[i]);
    ratios.push_back(o);
  }
  rep["ratios"] = ratios;
  rep["ratio_trends_to_one"] = report.ratio_trends_to_one;
  rep["ratio_approaches_band"] = report.ratio_approaches_band;
  rep["last_ratio_in_band"] = report.last_ratio_in_band;
  rep["band_note"] = "the o(.) term is not quantified; the [1/2, 2] band is a falsifiable proxy";
  rep["warnings"] = report.warnings;
  j["report"] = rep;
  j["checks"] = checks_array(checks);
  return j.dump(2) + "\n";
}

std::string checks_json(const std::vector<PropertyCheck>& checks, const Metadata& meta) {
  Json j;
  j["metadata"] = metadata_json(meta);
  j["passed"] = std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
  j["checks"] = checks_array(checks);
  return j.dump(2) + "\n";
}

std::string svg_plot(const PlotSpec& spec, const Metadata& meta) {
  const double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
  auto tr = [&](double y) { return spec.log_y ? std::log10(y) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && !(s.y[i] > 0.0))) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, tr(s.y[i]));
      y1 = std::max(y1, tr(s.y[i]));
    }
  if (!std::isfinite(x0)) {
    x0 = 0.0;
    x1 = 1.0;
    y0 = 0.0;
    y1 = 1.0;
  }
  auto pad = [](double& a, double& b) {
    const double span = b - a;
    const double p = span > 0.0 ? 0.05 * span : (std::abs(a) > 0.0 ? 0.05 * std::abs(a) : 1.0);
    a -= p;
    b += p;
  };
  pad(x0, x1);
  pad(y0, y1);
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  s += svg_metadata(meta);
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       xml_escape(spec.title) + "</text>\n";
  s += "<g stroke=\"black\" fill=\"none\"><rect x=\"" + fmt("%.2f", L) + "\" y=\"" + fmt("%.2f", T) +
       "\" width=\"" + fmt("%.2f", W - L - R) + "\" height=\"" + fmt("%.2f", H - T - B) + "\"/></g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : ticks(x0, x1)) {
    s += "<line x1=\"" + fmt("%.2f", px(t)) + "\" y1=\"" + fmt("%.2f", H - B) + "\" x2=\"" + fmt("%.2f", px(t)) +
         "\" y2=\"" + fmt("%.2f", H - B + 5) + "\" stroke=\"black\"/>";
    s += "<text x=\"" + fmt("%.2f", px(t)) + "\" y=\"" + fmt("%.2f", H - B + 18) + "\" text-anchor=\"middle\">" +
         fmt("%g", t) + "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    const std::string label = spec.log_y ? "1e" + fmt("%g", t) : fmt("%g", t);
    s += "<line x1=\"" + fmt("%.2f", L - 5) + "\" y1=\"" + fmt("%.2f", py(t)) + "\" x2=\"" + fmt("%.2f", L) +
         "\" y2=\"" + fmt("%.2f", py(t)) + "\" stroke=\"black\"/>";
    s += "<text x=\"" + fmt("%.2f", L - 8) + "\" y=\"" + fmt("%.2f", py(t) + 4) + "\" text-anchor=\"end\">" +
         xml_escape(label) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", (L + W - R) / 2) + "\" y=\"" + fmt("%.2f", H - 18) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(spec.x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + fmt("%.2f", (T + H - B) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
       "transform=\"rotate(-90 18 " + fmt("%.2f", (T + H - B) / 2) + ")\">" + xml_escape(spec.y_label) +
       "</text>\n</g>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& ser = spec.series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::string pts, marks;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i]) || (spec.log_y && !(ser.y[i] > 0.0))) continue;
      const std::string cx = fmt("%.2f", px(ser.x[i])), cy = fmt("%.2f", py(tr(ser.y[i])));
      pts += cx + "," + cy + " ";
      marks += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"3\" fill=\"" + color + "\"/>";
    }
    if (ser.line && !pts.empty())
      s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    if (ser.markers) s += marks + "\n";
    const double ly = T + 16 + 16 * k;
    s += "<text x=\"" + fmt("%.2f", W - R - 8) + "\" y=\"" + fmt("%.2f", ly) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" +
         xml_escape(ser.label) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string svg_trajectory(const Shape& shape, const std::vector<AsymptoticRecord>& records, const Metadata& meta) {
  const double W = 560, M = 30;
  const Box b = shape.bounding_box();
  const bool one_d = shape.dimension() == 1;
  const double span_x = b.hi[0] - b.lo[0];
  const double span_y = one_d ? 0.2 * span_x : b.hi[1] - b.lo[1];
  const double scale = (W - 2 * M) / std::max(span_x, span_y);
  const double H = span_y * scale + 2 * M + 20;
  auto px = [&](double x) { return M + (x - b.lo[0]) * scale; };
  auto py = [&](double y) { return one_d ? H / 2 : M + (b.hi[1] - y) * scale; };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", W) + "\" height=\"" + fmt("%.0f", H) +
       "\" viewBox=\"0 0 " + fmt("%.0f", W) + " " + fmt("%.0f", H) + "\">\n";
  s += svg_metadata(meta);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<g fill=\"#eef3fb\" stroke=\"black\" stroke-width=\"1.2\">\n";
  auto polygon = [&](const std::vector<Point>& v) {
    std::string p;
    for (const auto& q : v) p += fmt("%.2f", px(q[0])) + "," + fmt("%.2f", py(q[1])) + " ";
    return "<polygon points=\"" + p + "\"/>\n";
  };
  auto circle = [&](const Disk& d) {
    return "<circle cx=\"" + fmt("%.2f", px(d.center[0])) + "\" cy=\"" + fmt("%.2f", py(d.center[1])) +
           "\" r=\"" + fmt("%.2f", d.radius * scale) + "\"/>\n";
  };
  if (one_d) {
    s += "<line x1=\"" + fmt("%.2f", px(b.lo[0])) + "\" y1=\"" + fmt("%.2f", H / 2) + "\" x2=\"" +
         fmt("%.2f", px(b.hi[0])) + "\" y2=\"" + fmt("%.2f", H / 2) + "\" stroke-width=\"3\"/>\n";
  } else {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            s += polygon({p.lower, {p.upper[0], p.lower[1]}, p.upper, {p.lower[0], p.upper[1]}});
          } else if constexpr (std::is_same_v<T, Disk>) {
            s += circle(p);
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            s += "<ellipse cx=\"" + fmt("%.2f", px(p.center[0])) + "\" cy=\"" + fmt("%.2f", py(p.center[1])) +
                 "\" rx=\"" + fmt("%.2f", p.semi_x * scale) + "\" ry=\"" + fmt("%.2f", p.semi_y * scale) +
                 "\"/>\n";
          } else if constexpr (std::is_same_v<T, LShape>) {
            const double x = p.origin[0], y = p.origin[1], a = p.size, m = 0.5 * p.size;
            s += polygon({{x, y}, {x + a, y}, {x + a, y + m}, {x + m, y + m}, {x + m, y + a}, {x, y + a}});
          } else if constexpr (std::is_same_v<T, Polygon>) {
            s += polygon(p.vertices);
          } else {
            for (const auto& d : p.disks) s += circle(d);
            for (const auto& c : p.necks) {
              const double dx = c.b[0] - c.a[0], dy = c.b[1] - c.a[1];
              const double len = std::hypot(dx, dy);
              const double nx = -dy / len * c.radius, ny = dx / len * c.radius;
              s += polygon({{c.a[0] + nx, c.a[1] + ny},
                            {c.b[0] + nx, c.b[1] + ny},
                            {c.b[0] - nx, c.b[1] - ny},
                            {c.a[0] - nx, c.a[1] - ny}});
            }
          }
        },
        shape.primitive());
  }
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
  std::string path;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const std::string cx = fmt("%.2f", px(r.center[0])), cy = fmt("%.2f", py(r.center[1]));
    path += cx + "," + cy + " ";
    s += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"" + fmt("%.2f", std::max(2.0, ball_radius(shape.dimension(), r.eps) * scale)) +
         "\" fill=\"none\" stroke=\"#d62728\"/>";
    s += "<text x=\"" + fmt("%.2f", px(r.center[0]) + 4) + "\" y=\"" + fmt("%.2f", py(r.center[1]) - 4) +
         "\">eps=" + fmt("%g", r.eps) + "</text>\n";
  }
  if (!path.empty())
    s += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"3 2\" points=\"" + path + "\"/>\n";
  return s + "</g>\n</svg>\n";
}

}  // namespace bbeig
