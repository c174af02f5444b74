#include <gtest/gtest.h>

#include <cmath>

#include "bbeig/error.hpp"
#include "bbeig/placement.hpp"

using namespace bbeig;

namespace {

struct Setup {
  DomainPtr domain;
  double h;
};

Setup setup(const Shape& s, double eps, int cells_per_radius = 6) {
  const double h = ball_radius(2, eps) / cells_per_radius;
  return {build_domain(s, make_grid(s, h)), h};
}

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

TEST(CoarseSearch, DiskBestNearCenter) {
  const double eps = 0.05;
  auto s = setup(Shape(Disk{{0, 0}, 1.0}), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const double stride = prob.default_stride();
  EXPECT_NEAR(stride, std::max(4 * s.h, prob.radius() / 2), 1e-15);
  const auto c = coarse_search(prob, stride);
  ASSERT_FALSE(c.empty());
  EXPECT_LE(dist(c.front().center, {0, 0}), stride + 1e-12);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i - 1].lambda, c[i].lambda);
}

TEST(CoarseSearch, SquareBestNearCenter) {
  const double eps = 0.05;
  auto s = setup(Shape::unit_square(), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const double stride = prob.default_stride();
  const auto c = coarse_search(prob, stride);
  EXPECT_LE(dist(c.front().center, {0.5, 0.5}), stride + 1e-12);
}

TEST(CoarseSearch, SymmetricCentersHaveEqualLambda) {
  const double eps = 0.05;
  auto s = setup(Shape::unit_square(), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const double a = 4 * s.h, b = 2 * s.h;
  const double l = prob.lambda({0.5 + a, 0.5 + b});
  for (const Point& p : {Point{0.5 - a, 0.5 + b}, Point{0.5 + a, 0.5 - b}, Point{0.5 + b, 0.5 + a},
                         Point{0.5 - b, 0.5 - a}})
    EXPECT_NEAR(prob.lambda(p) / l, 1.0, 1e-8);
}

TEST(Refine, FixedPointAtOptimum) {
  const double eps = 0.05;
  auto s = setup(Shape::unit_square(), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const auto r = refine(prob, {0.5, 0.5});
  EXPECT_EQ(r.accepted_moves, 0);
  EXPECT_EQ(r.center[0], 0.5);
  EXPECT_EQ(r.center[1], 0.5);
}

TEST(Refine, ConvergesFromOffsetStart) {
  const double eps = 0.05;
  auto s = setup(Shape::unit_square(), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const auto r = refine(prob, {0.5 + 3 * s.h, 0.5 - 3 * s.h});
  EXPECT_LE(dist(r.center, {0.5, 0.5}), 0.5 * s.h + 1e-12);
  EXPECT_GT(r.accepted_moves, 0);
  double prev = INFINITY;
  for (const auto& t : r.trace) {
    if (!t.accepted) continue;
    EXPECT_LE(t.lambda, prev);
    prev = t.lambda;
  }
}

TEST(Optimize, DiskConcentric) {
  const double eps = 0.05;
  auto s = setup(Shape(Disk{{0, 0}, 1.0}), eps, 8);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const auto r = optimize_center(prob);
  EXPECT_LE(dist(r.center, {0, 0}), 2 * s.h);
}

TEST(Optimize, RectangleCenter) {
  const double eps = 0.05;
  auto s = setup(Shape(Rectangle{{0, 0}, {2, 1}}), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const auto r = optimize_center(prob);
  EXPECT_LE(dist(r.center, {1.0, 0.5}), 2 * s.h);
  EXPECT_LE(r.lambda, prob.lambda(incenter(*s.domain).q) * (1 + 1e-12));
}

TEST(Optimize, LShapeNearInradius) {
  const double eps = 0.02;
  const Shape shape(LShape{{0, 0}, 2.0});
  auto s = setup(shape, eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  const auto r = optimize_center(prob);
  const double d_max = incenter(*s.domain).d_max;
  EXPECT_GE(s.domain->distance_at(r.center), 0.9 * d_max);
  EXPECT_LE(r.lambda, prob.lambda(incenter(*s.domain).q) * (1 + 1e-12));
}

TEST(Optimize, TranslationEquivariance) {
  const double eps = 0.05;
  const Point shift{0.3, 0.7};
  const Shape base(Rectangle{{0, 0}, {1.2, 1}});
  auto a = setup(base, eps);
  auto b = setup(base.translated(shift), eps);
  PlacementProblem pa(a.domain, eps, 1.0, 0.25), pb(b.domain, eps, 1.0, 0.25);
  const auto ra = optimize_center(pa), rb = optimize_center(pb);
  EXPECT_NEAR(rb.center[0] - ra.center[0], shift[0], 1e-9);
  EXPECT_NEAR(rb.center[1] - ra.center[1], shift[1], 1e-9);
  EXPECT_NEAR(rb.lambda / ra.lambda, 1.0, 1e-8);
}

TEST(Optimize, Reproducible) {
  const double eps = 0.05;
  auto s = setup(Shape(Ellipse{{0, 0}, 1.0, 0.6}), eps);
  PlacementSettings settings;
  settings.workers = 2;
  PlacementProblem p1(s.domain, eps, 1.0, 0.25, settings), p2(s.domain, eps, 1.0, 0.25, settings);
  const auto a = optimize_center(p1), b = optimize_center(p2);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].center, b.trace[i].center);
    EXPECT_EQ(a.trace[i].lambda, b.trace[i].lambda);
  }
  EXPECT_EQ(a.center, b.center);
}

TEST(Placement, InadmissibleCenters) {
  const double eps = 0.05;
  auto s = setup(Shape::unit_square(), eps);
  PlacementProblem prob(s.domain, eps, 1.0, 0.25);
  EXPECT_FALSE(prob.admissible({0.05, 0.5}));
  EXPECT_TRUE(prob.admissible({0.5, 0.5}));
  PlacementProblem too_large(s.domain, 2.0, 1.0, 0.25);
  EXPECT_THROW(optimize_center(too_large), GeometryError);
}
