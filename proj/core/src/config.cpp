#include "bbeig/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "bbeig/error.hpp"

namespace bbeig {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a number, got '" + t + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(key, part));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  const char* doc;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define BBEIG_DOUBLE(sec, name, doc)                                                   \
  Field { sec, #name, doc, [](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
          [](const RunConfig& c) { return format_double(c.name); } }
#define BBEIG_INT(sec, name, doc)                                                   \
  Field { sec, #name, doc, [](RunConfig& c, const std::string& v) { c.name = to_int(#name, v); }, \
          [](const RunConfig& c) { return std::to_string(c.name); } }
#define BBEIG_BOOL(sec, name, doc)                                                   \
  Field { sec, #name, doc, [](RunConfig& c, const std::string& v) { c.name = to_bool(#name, v); }, \
          [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); } }
#define BBEIG_TEXT(sec, name, doc)                                                          \
  Field { sec, #name, doc, [](RunConfig& c, const std::string& v) { c.name = trim(v); }, \
          [](const RunConfig& c) { return c.name; } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      BBEIG_TEXT("domain", shape, "domain descriptor (required)"),
      BBEIG_DOUBLE("grid", h, "grid spacing; 0 uses r(eps)/cells_per_radius for each eps"),
      BBEIG_INT("grid", cells_per_radius, "grid cells per ball radius when h = 0"),
      BBEIG_DOUBLE("weight", m_bar, "favourable weight level"),
      BBEIG_DOUBLE("weight", m_under, "hostile weight level (the weight there is -m_under)"),
      BBEIG_DOUBLE("weight", rho, "transition radius of the limit problem; 0 uses the measure-one ball"),
      Field{"sweep", "eps_list", "strictly decreasing favourable measures",
            [](RunConfig& c, const std::string& v) { c.eps_list = to_list("eps_list", v); },
            [](const RunConfig& c) { return list_text(c.eps_list); }},
      BBEIG_DOUBLE("sweep", l2_gap_radius, "radius of the ball for the blow-up L2 gap"),
      BBEIG_DOUBLE("sweep", reference_margin, "extra radius of the discrete limit problem, in decay lengths"),
      BBEIG_BOOL("sweep", blowup_analysis, "compute the blow-up quantities of each row"),
      BBEIG_DOUBLE("optimizer", stride, "coarse lattice stride; 0 uses max(4h, r(eps)/2)"),
      BBEIG_INT("optimizer", top_k, "coarse candidates refined"),
      BBEIG_INT("optimizer", coarse_grid_factor, "coarse stage grid is this many times coarser"),
      BBEIG_INT("optimizer", subsamples, "rim subsamples per axis"),
      BBEIG_DOUBLE("solver", ritz_tolerance, "Lanczos relative residual bound"),
      BBEIG_INT("solver", krylov_dimension, "Lanczos basis size before a restart"),
      BBEIG_INT("solver", max_restarts, "Lanczos restarts"),
      BBEIG_DOUBLE("solver", cg_tolerance, "conjugate gradient relative residual"),
      BBEIG_INT("solver", cg_max_iterations, "conjugate gradient iterations"),
      BBEIG_DOUBLE("solver", memory_budget_mb, "memory for a sparse factor or a blow-up grid, MB"),
      BBEIG_BOOL("solver", iterative, "use conjugate gradients instead of Cholesky"),
      BBEIG_TEXT("output", directory, "output directory"),
      BBEIG_BOOL("output", timestamp, "write a timestamp into SVG metadata"),
      BBEIG_BOOL("output", plots, "write SVG plots"),
      BBEIG_DOUBLE("run", eps, "favourable measure for solve and optimize"),
      Field{"run", "center", "ball center x,y for solve; empty uses the incenter",
            [](RunConfig& c, const std::string& v) {
              const std::string t = trim(v);
              if (t.empty()) {
                c.center.reset();
                return;
              }
              const auto parts = split(t, ',');
              if (parts.size() > 2) throw ConfigError("center: expected x or x,y");
              Point p{to_double("center", parts[0]), 0.0};
              if (parts.size() == 2) p[1] = to_double("center", parts[1]);
              c.center = p;
            },
            [](const RunConfig& c) {
              if (!c.center) return std::string();
              return format_double((*c.center)[0]) + ", " + format_double((*c.center)[1]);
            }},
      BBEIG_INT("run", workers, "worker threads"),
  };
  return table;
}

#undef BBEIG_DOUBLE
#undef BBEIG_INT
#undef BBEIG_BOOL
#undef BBEIG_TEXT

const char* const kSections[] = {"domain", "grid", "weight", "sweep", "optimizer", "solver", "output", "run"};

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

std::vector<double> shape_args(const std::string& name, const std::string& inner, std::size_t min,
                               std::size_t max) {
  std::vector<double> v;
  if (!trim(inner).empty()) v = to_list(name, inner);
  if (v.size() < min || v.size() > max) {
    const std::string want = min == max ? std::to_string(min) : std::to_string(min) + " or more";
    throw ConfigError("shape " + name + ": expected " + want + " arguments, got " + std::to_string(v.size()));
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Shape parse_shape(const std::string& descriptor) {
  const std::string d = trim(descriptor);
  if (d.empty()) throw ConfigError("shape: empty domain descriptor");
  const auto open = d.find('(');
  const std::string name = trim(d.substr(0, open));
  std::string inner;
  if (open != std::string::npos) {
    if (d.back() != ')') throw ConfigError("shape: missing ')' in '" + d + "'");
    inner = d.substr(open + 1, d.size() - open - 2);
  }
  try {
    if (name == "interval") {
      const auto a = shape_args(name, inner, 2, 2);
      return Shape::interval(a[0], a[1]);
    }
    if (name == "rectangle") {
      const auto a = shape_args(name, inner, 4, 4);
      return Shape(Rectangle{{a[0], a[1]}, {a[2], a[3]}});
    }
    if (name == "square") {
      shape_args(name, inner, 0, 0);
      return Shape::unit_square();
    }
    if (name == "disk") {
      const auto a = shape_args(name, inner, 3, 3);
      return Shape(Disk{{a[0], a[1]}, a[2]});
    }
    if (name == "ellipse") {
      const auto a = shape_args(name, inner, 4, 4);
      return Shape(Ellipse{{a[0], a[1]}, a[2], a[3]});
    }
    if (name == "lshape") {
      const auto a = shape_args(name, inner, 3, 3);
      return Shape(LShape{{a[0], a[1]}, a[2]});
    }
    if (name == "polygon") {
      const auto a = shape_args(name, inner, 6, 1u << 20);
      if (a.size() % 2 != 0) throw ConfigError("shape polygon: odd number of coordinates");
      Polygon p;
      for (std::size_t i = 0; i < a.size(); i += 2) p.vertices.push_back({a[i], a[i + 1]});
      return Shape(p);
    }
    if (name == "dumbbell") {
      shape_args(name, inner, 0, 0);
      return Shape::dumbbell();
    }
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("shape: ") + e.what());
  }
  throw ConfigError("shape: unknown domain '" + name + "'");
}

Shape RunConfig::domain() const { return parse_shape(shape); }

WeightParams RunConfig::weight_params() const {
  WeightParams p;
  p.dimension = domain().dimension();
  p.m_bar = m_bar;
  p.m_under = m_under;
  p.rho = rho;
  return p;
}

EigenOptions RunConfig::eigen_options() const {
  EigenOptions o;
  o.ritz_tolerance = ritz_tolerance;
  o.krylov_dimension = krylov_dimension;
  o.max_restarts = max_restarts;
  o.linear.cg_tolerance = cg_tolerance;
  o.linear.cg_max_iterations = cg_max_iterations;
  o.linear.memory_budget_bytes = memory_budget_mb * 1e6;
  o.linear.force_iterative = iterative;
  return o;
}

PlacementSettings RunConfig::placement_settings() const {
  PlacementSettings s;
  s.stride = stride;
  s.top_k = top_k;
  s.coarse_grid_factor = coarse_grid_factor;
  s.subsamples = subsamples;
  s.workers = workers;
  s.eigen = eigen_options();
  return s;
}

SweepSettings RunConfig::sweep_settings() const {
  SweepSettings s;
  s.eps_list = eps_list;
  s.fixed_h = h;
  s.cells_per_radius = cells_per_radius;
  s.l2_gap_radius = l2_gap_radius;
  s.reference_margin = reference_margin;
  s.blowup_analysis = blowup_analysis;
  s.workers = workers;
  s.memory_budget_bytes = memory_budget_mb * 1e6;
  s.placement = placement_settings();
  return s;
}

double RunConfig::grid_h(double e) const {
  return h > 0.0 ? h : ball_radius(domain().dimension(), e) / cells_per_radius;
}

void set_config_value(RunConfig& config, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError("override '" + dotted_key + "' must be section.key");
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const Field* f = find_field(section, key);
  if (!f) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  f->set(config, value);
}

void validate(const RunConfig& c) {
  if (trim(c.shape).empty()) throw ConfigError("missing [domain] section: shape is required");
  const Shape s = c.domain();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  auto nonnegative = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must not be negative");
  };
  auto at_least = [](int v, int lo, const char* name) {
    if (v < lo) throw ConfigError(std::string(name) + " must be at least " + std::to_string(lo));
  };
  nonnegative(c.h, "h");
  at_least(c.cells_per_radius, 1, "cells_per_radius");
  positive(c.m_bar, "m_bar");
  positive(c.m_under, "m_under");
  nonnegative(c.rho, "rho");
  if (c.eps_list.empty()) throw ConfigError("eps_list must not be empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    if (!(c.eps_list[i] > 0.0)) throw ConfigError("eps_list entries must be positive");
    if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) throw ConfigError("eps_list must be strictly decreasing");
  }
  positive(c.l2_gap_radius, "l2_gap_radius");
  positive(c.reference_margin, "reference_margin");
  nonnegative(c.stride, "stride");
  at_least(c.top_k, 1, "top_k");
  at_least(c.coarse_grid_factor, 1, "coarse_grid_factor");
  at_least(c.subsamples, 1, "subsamples");
  positive(c.ritz_tolerance, "ritz_tolerance");
  at_least(c.krylov_dimension, 2, "krylov_dimension");
  at_least(c.max_restarts, 0, "max_restarts");
  positive(c.cg_tolerance, "cg_tolerance");
  at_least(c.cg_max_iterations, 1, "cg_max_iterations");
  positive(c.memory_budget_mb, "memory_budget_mb");
  if (trim(c.directory).empty()) throw ConfigError("directory must not be empty");
  positive(c.eps, "eps");
  at_least(c.workers, 1, "workers");
  if (s.dimension() == 1 && c.center && (*c.center)[1] != 0.0)
    throw ConfigError("center: one-dimensional domains take a single coordinate");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::none_of(std::begin(kSections), std::end(kSections), [&](const char* s) { return section == s; }))
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const Field* f = find_field(section, key);
    if (!f) throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
    try {
      f->set(c, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string echo(const RunConfig& config) {
  std::string out, section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

std::vector<ConfigKey> config_keys() {
  const RunConfig defaults;
  std::vector<ConfigKey> out;
  for (const auto& f : fields()) out.push_back({f.section, f.key, f.get(defaults), f.doc});
  return out;
}

}  // namespace bbeig
