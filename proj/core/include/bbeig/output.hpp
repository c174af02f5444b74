#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bbeig/asymptotics.hpp"
#include "bbeig/config.hpp"
#include "bbeig/limit_problem.hpp"

namespace bbeig {

std::string version_string();

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
// Hash of the canonical echo of the config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct Metadata {
  std::string command;
  std::string version;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> tolerances;
  std::optional<std::string> timestamp;  // SVG only
};

Metadata make_metadata(const RunConfig& config, const std::string& command);

// Creates the directory if needed and proves it writable with a probe file.
void ensure_writable(const std::string& directory);
void write_file(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_field(const std::string& value);
// '#'-prefixed metadata lines, then the header and rows, CRLF-free.
std::string to_csv(const CsvTable& table, const Metadata& meta);
// Skips leading '#' lines; RFC 4180 quoting.
CsvTable parse_csv(const std::string& text);

// 17 significant digits.
std::string csv_number(double v);

CsvTable records_table(const std::vector<AsymptoticRecord>& records);
std::vector<AsymptoticRecord> records_from_table(const CsvTable& table);

// Distance field on every grid node, row-major, header x,y,d.
CsvTable distance_table(const GridDomain& domain);

struct EigenSummary {
  std::string shape;
  double eps = 0.0;
  double h = 0.0;
  int unknowns = 0;
  Point center{0.0, 0.0};
  double dist = 0.0;
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int accepted_moves = 0;
};

std::string limit_json(const LimitSolution& sol, const Metadata& meta);
std::string eigen_json(const EigenSummary& summary, const Metadata& meta);
std::string sweep_json(const std::vector<AsymptoticRecord>& records, const ExpansionReport& report,
                       const LimitSolution& sol, const std::vector<PropertyCheck>& checks, const Metadata& meta);
std::string checks_json(const std::vector<PropertyCheck>& checks, const Metadata& meta);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
  bool line = true;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

std::string svg_plot(const PlotSpec& spec, const Metadata& meta);
// Domain outline with the ball centers, labelled by eps.
std::string svg_trajectory(const Shape& shape, const std::vector<AsymptoticRecord>& records, const Metadata& meta);

}  // namespace bbeig
