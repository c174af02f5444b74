#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bbeig/asymptotics.hpp"
#include "bbeig/geometry.hpp"
#include "bbeig/limit_problem.hpp"

namespace bbeig {

// Grammar (one statement per line):
//   # comment            anything after '#' is ignored
//   [section]            one of domain, grid, weight, sweep, optimizer, solver, output, run
//   key = value          number, true/false, comma-separated list, or bare text
// Keys may appear in any order; repeating a key overrides it. Unknown
// sections and keys are errors.
struct RunConfig {
  // [domain]
  std::string shape;  // descriptor, see parse_shape
  // [grid]
  double h = 0.0;  // 0: r(eps) / cells_per_radius per eps
  int cells_per_radius = 8;
  // [weight]
  double m_bar = 1.0;
  double m_under = 0.25;
  double rho = 0.0;  // 0: radius of the measure-one ball
  // [sweep]
  std::vector<double> eps_list{0.1, 0.07, 0.05, 0.03, 0.02, 0.01};
  double l2_gap_radius = 4.0;
  double reference_margin = 4.0;
  bool blowup_analysis = true;
  // [optimizer]
  double stride = 0.0;  // 0: max(4h, r(eps)/2)
  int top_k = 3;
  int coarse_grid_factor = 1;
  int subsamples = 4;
  // [solver]
  double ritz_tolerance = 1e-12;
  int krylov_dimension = 60;
  int max_restarts = 40;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 50000;
  double memory_budget_mb = 2000.0;
  bool iterative = false;
  // [output]
  std::string directory = "bbeig-out";
  bool timestamp = true;
  bool plots = true;
  // [run]
  double eps = 0.05;
  std::optional<Point> center;  // empty: the incenter
  int workers = 1;

  Shape domain() const;
  WeightParams weight_params() const;
  EigenOptions eigen_options() const;
  PlacementSettings placement_settings() const;
  SweepSettings sweep_settings() const;
  // Grid spacing used for a given eps.
  double grid_h(double eps) const;
};

// Domain descriptors:
//   interval(a,b)  rectangle(x0,y0,x1,y1)  square  disk(cx,cy,r)
//   ellipse(cx,cy,a,b)  lshape(x0,y0,size)  polygon(x1,y1,x2,y2,...)  dumbbell
Shape parse_shape(const std::string& descriptor);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Sets section.key from text, as a config line would.
void set_config_value(RunConfig& config, const std::string& dotted_key, const std::string& value);

// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

// Canonical text form with every key; parse_config(echo(c)) reproduces c.
std::string echo(const RunConfig& config);

struct ConfigKey {
  std::string section;
  std::string key;
  std::string default_value;
  std::string doc;
};
std::vector<ConfigKey> config_keys();

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace bbeig
