#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bbeig/error.hpp"
#include "bbeig/output.hpp"

using namespace bbeig;

namespace {

Metadata meta() {
  Metadata m;
  m.command = "test";
  m.version = version_string();
  m.config_hash = "0123456789abcdef";
  m.tolerances = {{"ratio_band", "2"}};
  return m;
}

AsymptoticRecord sample(double eps) {
  AsymptoticRecord r;
  r.eps = eps;
  r.k = std::sqrt(eps);
  r.beta = 1.0 / r.k;
  r.h = 0.1 / 3.0;
  r.center = {0.1 + 1e-17, -1.0 / 7.0};
  r.lambda = 1.0 / 3.0 * 1e5;
  r.gap = 4.9e-300;
  r.ratio = std::nextafter(1.0, 2.0);
  r.evaluations = 17;
  r.error = eps < 0.02 ? "failed, with \"quotes\"" : "";
  return r;
}

}  // namespace

TEST(Csv, RecordsRoundTripBitExact) {
  const std::vector<AsymptoticRecord> rows = {sample(0.1), sample(0.01)};
  const auto text = to_csv(records_table(rows), meta());
  EXPECT_EQ(text.find('\r'), std::string::npos);
  const auto back = records_from_table(parse_csv(text));
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].eps, rows[i].eps);
    EXPECT_EQ(back[i].h, rows[i].h);
    EXPECT_EQ(back[i].center, rows[i].center);
    EXPECT_EQ(back[i].lambda, rows[i].lambda);
    EXPECT_EQ(back[i].gap, rows[i].gap);
    EXPECT_EQ(back[i].ratio, rows[i].ratio);
    EXPECT_EQ(back[i].evaluations, rows[i].evaluations);
    EXPECT_EQ(back[i].error, rows[i].error);
  }
}

TEST(Csv, MetadataLinesSkipped) {
  const auto t = parse_csv("# a\n# b\nx,y\n1,\"2,3\"\n");
  ASSERT_EQ(t.header.size(), 2u);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "2,3");
  EXPECT_EQ(csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}

TEST(Csv, NonFiniteNumbers) {
  AsymptoticRecord r = sample(0.1);
  r.ratio = NAN;
  r.psi_tilde = INFINITY;
  const auto back = records_from_table(parse_csv(to_csv(records_table({r}), meta())));
  EXPECT_TRUE(std::isnan(back[0].ratio));
  EXPECT_EQ(back[0].psi_tilde, INFINITY);
}

TEST(Csv, DistanceTable) {
  const Shape s = Shape::unit_square();
  const auto d = build_domain(s, make_grid(s, 0.25));
  const auto t = distance_table(*d);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y", "d"}));
  EXPECT_EQ(static_cast<int>(t.rows.size()), d->grid().node_count());
  bool found = false;
  for (const auto& row : t.rows)
    if (std::stod(row[0]) == 0.5 && std::stod(row[1]) == 0.5) {
      EXPECT_NEAR(std::stod(row[2]), 0.5, 1e-12);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(Json, ChecksCarryPassedFlags) {
  const auto text = checks_json({{"one", true, "fine"}, {"two", false, "bad"}}, meta());
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["metadata"]["config_hash"], "0123456789abcdef");
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["passed"], true);
  EXPECT_EQ(j["checks"][1]["passed"], false);
  EXPECT_EQ(j["checks"][1]["name"], "two");
}

TEST(Json, LimitFields) {
  const auto sol = solve_limit_problem(WeightParams::standard(2, 1.0, 0.25));
  const auto j = nlohmann::json::parse(limit_json(sol, meta()));
  EXPECT_EQ(j["lambda0"].get<double>(), sol.lambda0);
  EXPECT_EQ(j["Phi"].get<double>(), sol.phi);
}

TEST(Svg, ParsesAsXml) {
  PlotSpec spec{"gap & <ratio>", "eps", "gap", true, {{"data", {0.1, 0.05, 0.01}, {1e-3, 1e-5, 1e-12}}}};
  Metadata m = meta();
  m.timestamp = "2026-01-01T00:00:00Z";
  const auto text = svg_plot(spec, m);
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  EXPECT_EQ(tree.count("svg"), 1u);
  EXPECT_NE(text.find("2026-01-01T00:00:00Z"), std::string::npos);
  EXPECT_NE(text.find("0123456789abcdef"), std::string::npos);
}

TEST(Svg, TrajectoryParsesAsXml) {
  const std::vector<AsymptoticRecord> rows = {sample(0.1), sample(0.05)};
  std::istringstream in(svg_trajectory(Shape(Disk{{0, 0}, 1.0}), rows, meta()));
  boost::property_tree::ptree tree;
  EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree));
}

TEST(Files, UnwritableDirectoryRejected) {
  const auto base = std::filesystem::temp_directory_path() / "bbeig_output_test";
  std::filesystem::create_directories(base);
  const auto blocker = base / "file";
  write_file(blocker.string(), "x");
  EXPECT_THROW(ensure_writable((blocker / "sub").string()), IoError);
  EXPECT_NO_THROW(ensure_writable((base / "ok").string()));
  std::filesystem::remove_all(base);
}

TEST(Hash, StableAndSensitive) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  RunConfig c = parse_config("[domain]\nshape = square\n");
  const auto h1 = config_hash(c);
  EXPECT_EQ(h1.size(), 16u);
  EXPECT_EQ(config_hash(c), h1);
  c.eps = 0.0501;
  EXPECT_NE(config_hash(c), h1);
}
