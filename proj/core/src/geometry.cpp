#include "bbeig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <utility>

#include "bbeig/error.hpp"
#include "bbeig/limit_problem.hpp"

namespace bbeig {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm(double x, double y) { return std::hypot(x, y); }

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b[0] - a[0];
  const double vy = b[1] - a[1];
  const double wx = p[0] - a[0];
  const double wy = p[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(wx - t * vx, wy - t * vy);
}

// Distance from (y0, y1), both >= 0, to the ellipse with semi-axes e0 >= e1.
// Bisection on the Lagrange multiplier after Eberly.
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : norm(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    const double gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (gs > 0.0) s0 = s;
    else if (gs < 0.0) s1 = s;
    else break;
  }
  return s;
}

double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double sbar = ellipse_root(r0, z0, z1, g);
      const double x0 = r0 * y0 / (sbar + r0);
      const double x1 = y1 / (sbar + 1.0);
      return norm(x0 - y0, x1 - y1);
    }
    return std::fabs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return norm(x0 - y0, x1);
  }
  return std::fabs(y0 - e0);
}

double ellipse_distance(const Ellipse& e, const Point& p) {
  double y0 = std::fabs(p[0] - e.center[0]);
  double y1 = std::fabs(p[1] - e.center[1]);
  double a = e.semi_x;
  double b = e.semi_y;
  if (a < b) {
    std::swap(a, b);
    std::swap(y0, y1);
  }
  return ellipse_distance_quadrant(a, b, y0, y1);
}

std::vector<std::pair<Point, Point>> lshape_edges(const LShape& l) {
  const double x0 = l.origin[0];
  const double y0 = l.origin[1];
  const double s = l.size;
  const double m = 0.5 * s;
  const std::vector<Point> v = {
      {x0, y0}, {x0 + s, y0}, {x0 + s, y0 + m}, {x0 + m, y0 + m}, {x0 + m, y0 + s}, {x0, y0 + s}};
  std::vector<std::pair<Point, Point>> edges;
  for (std::size_t i = 0; i < v.size(); ++i) edges.emplace_back(v[i], v[(i + 1) % v.size()]);
  return edges;
}

bool polygon_contains(const Polygon& poly, const Point& p) {
  bool inside = false;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segment_distance(p, v[i], v[j]) < 1e-14) return false;
    const bool crosses = (v[i][1] > p[1]) != (v[j][1] > p[1]);
    if (crosses) {
      const double xc = v[j][0] + (p[1] - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
      if (p[0] < xc) inside = !inside;
    }
  }
  return inside;
}

bool in_box(const Box& b, const Point& p, int dim) {
  if (!(p[0] > b.lo[0] && p[0] < b.hi[0])) return false;
  return dim == 1 || (p[1] > b.lo[1] && p[1] < b.hi[1]);
}

double box_distance(const Box& b, const Point& p, int dim) {
  double d = std::min(p[0] - b.lo[0], b.hi[0] - p[0]);
  if (dim == 2) d = std::min({d, p[1] - b.lo[1], b.hi[1] - p[1]});
  return d;
}

Point map_point(const Point& p, const Point& c, double k) { return {(p[0] - c[0]) / k, (p[1] - c[1]) / k}; }

}  // namespace

std::string to_string(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::rectangle:
      return "rectangle";
    case ShapeTag::disk:
      return "disk";
    case ShapeTag::ellipse:
      return "ellipse";
    case ShapeTag::lshape:
      return "lshape";
    case ShapeTag::polygon:
      return "polygon";
    case ShapeTag::disk_union:
      return "disk_union";
  }
  return "unknown";
}

Shape::Shape(Primitive primitive, int dimension) : primitive_(std::move(primitive)), dimension_(dimension) {
  if (dimension_ != 1 && dimension_ != 2) throw GeometryError("grid dimension must be 1 or 2");
  const ShapeTag t = tag();
  if (dimension_ == 1 && t != ShapeTag::rectangle && t != ShapeTag::disk)
    throw GeometryError("only intervals are available in one dimension");
  std::visit(Overloaded{
                 [&](const Rectangle& r) {
                   if (!(r.upper[0] > r.lower[0]) || (dimension_ == 2 && !(r.upper[1] > r.lower[1])))
                     throw GeometryError("rectangle corners out of order");
                 },
                 [](const Disk& d) {
                   if (!(d.radius > 0.0)) throw GeometryError("disk radius must be positive");
                 },
                 [](const Ellipse& e) {
                   if (!(e.semi_x > 0.0 && e.semi_y > 0.0)) throw GeometryError("ellipse semi-axes must be positive");
                 },
                 [](const LShape& l) {
                   if (!(l.size > 0.0)) throw GeometryError("L-shape size must be positive");
                 },
                 [](const Polygon& p) {
                   if (p.vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
                 },
                 [](const DiskUnion& u) {
                   if (u.disks.empty()) throw GeometryError("disk union needs at least one disk");
                   for (const auto& d : u.disks)
                     if (!(d.radius > 0.0)) throw GeometryError("disk radius must be positive");
                   for (const auto& c : u.necks)
                     if (!(c.radius > 0.0)) throw GeometryError("neck radius must be positive");
                 },
             },
             primitive_);
}

Shape Shape::interval(double a, double b) { return Shape(Rectangle{{a, 0.0}, {b, 0.0}}, 1); }

Shape Shape::unit_square() { return Shape(Rectangle{{0.0, 0.0}, {1.0, 1.0}}); }

Shape Shape::dumbbell() {
  DiskUnion u;
  u.disks = {Disk{{0.0, 0.0}, 0.5}, Disk{{1.1, 0.0}, 0.3}};
  u.necks = {Capsule{{0.0, 0.0}, {1.1, 0.0}, 0.08}};
  return Shape(u);
}

ShapeTag Shape::tag() const {
  return static_cast<ShapeTag>(primitive_.index());
}

bool Shape::contains(const Point& p) const {
  const int dim = dimension_;
  if (clip_ && !in_box(*clip_, p, dim)) return false;
  return std::visit(
      Overloaded{
          [&](const Rectangle& r) {
            return in_box(Box{r.lower, r.upper}, p, dim);
          },
          [&](const Disk& d) {
            if (dim == 1) return std::fabs(p[0] - d.center[0]) < d.radius;
            return norm(p[0] - d.center[0], p[1] - d.center[1]) < d.radius;
          },
          [&](const Ellipse& e) {
            const double u = (p[0] - e.center[0]) / e.semi_x;
            const double v = (p[1] - e.center[1]) / e.semi_y;
            return u * u + v * v < 1.0;
          },
          [&](const LShape& l) {
            const Box outer{l.origin, {l.origin[0] + l.size, l.origin[1] + l.size}};
            if (!in_box(outer, p, 2)) return false;
            const double m = 0.5 * l.size;
            return !(p[0] >= l.origin[0] + m && p[1] >= l.origin[1] + m);
          },
          [&](const Polygon& poly) { return polygon_contains(poly, p); },
          [&](const DiskUnion& u) {
            for (const auto& d : u.disks)
              if (norm(p[0] - d.center[0], p[1] - d.center[1]) < d.radius) return true;
            for (const auto& c : u.necks)
              if (segment_distance(p, c.a, c.b) < c.radius) return true;
            return false;
          },
      },
      primitive_);
}

bool Shape::has_exact_distance() const {
  const ShapeTag t = tag();
  return t == ShapeTag::rectangle || t == ShapeTag::disk || t == ShapeTag::ellipse || t == ShapeTag::lshape;
}

double Shape::exact_distance(const Point& p) const {
  if (!has_exact_distance()) throw GeometryError("no closed-form distance for " + to_string(tag()));
  if (!contains(p)) return 0.0;
  const int dim = dimension_;
  double d = std::visit(
      Overloaded{
          [&](const Rectangle& r) { return box_distance(Box{r.lower, r.upper}, p, dim); },
          [&](const Disk& c) {
            if (dim == 1) return c.radius - std::fabs(p[0] - c.center[0]);
            return c.radius - norm(p[0] - c.center[0], p[1] - c.center[1]);
          },
          [&](const Ellipse& e) { return ellipse_distance(e, p); },
          [&](const LShape& l) {
            double best = kInf;
            for (const auto& [a, b] : lshape_edges(l)) best = std::min(best, segment_distance(p, a, b));
            return best;
          },
          [](const auto&) { return 0.0; },
      },
      primitive_);
  if (clip_) d = std::min(d, box_distance(*clip_, p, dim));
  return d;
}

Box Shape::bounding_box() const {
  Box b = std::visit(
      Overloaded{
          [](const Rectangle& r) { return Box{r.lower, r.upper}; },
          [](const Disk& d) {
            return Box{{d.center[0] - d.radius, d.center[1] - d.radius}, {d.center[0] + d.radius, d.center[1] + d.radius}};
          },
          [](const Ellipse& e) {
            return Box{{e.center[0] - e.semi_x, e.center[1] - e.semi_y}, {e.center[0] + e.semi_x, e.center[1] + e.semi_y}};
          },
          [](const LShape& l) { return Box{l.origin, {l.origin[0] + l.size, l.origin[1] + l.size}}; },
          [](const Polygon& poly) {
            Box out{{kInf, kInf}, {-kInf, -kInf}};
            for (const auto& v : poly.vertices) {
              for (int a = 0; a < 2; ++a) {
                out.lo[a] = std::min(out.lo[a], v[a]);
                out.hi[a] = std::max(out.hi[a], v[a]);
              }
            }
            return out;
          },
          [](const DiskUnion& u) {
            Box out{{kInf, kInf}, {-kInf, -kInf}};
            for (const auto& d : u.disks) {
              for (int a = 0; a < 2; ++a) {
                out.lo[a] = std::min(out.lo[a], d.center[a] - d.radius);
                out.hi[a] = std::max(out.hi[a], d.center[a] + d.radius);
              }
            }
            for (const auto& c : u.necks) {
              for (int a = 0; a < 2; ++a) {
                out.lo[a] = std::min({out.lo[a], c.a[a] - c.radius, c.b[a] - c.radius});
                out.hi[a] = std::max({out.hi[a], c.a[a] + c.radius, c.b[a] + c.radius});
              }
            }
            return out;
          },
      },
      primitive_);
  if (dimension_ == 1) b.lo[1] = b.hi[1] = 0.0;
  if (clip_) {
    for (int a = 0; a < dimension_; ++a) {
      b.lo[a] = std::max(b.lo[a], clip_->lo[a]);
      b.hi[a] = std::min(b.hi[a], clip_->hi[a]);
    }
  }
  return b;
}

Point Shape::anchor() const {
  return std::visit(Overloaded{
                        [](const Rectangle& r) {
                          return Point{0.5 * (r.lower[0] + r.upper[0]), 0.5 * (r.lower[1] + r.upper[1])};
                        },
                        [](const Disk& d) { return d.center; },
                        [](const Ellipse& e) { return e.center; },
                        [](const LShape& l) { return l.origin; },
                        [](const Polygon& p) { return p.vertices.front(); },
                        [](const DiskUnion& u) { return u.disks.front().center; },
                    },
                    primitive_);
}

double Shape::volume() const {
  constexpr double pi = std::numbers::pi;
  return std::visit(Overloaded{
                        [&](const Rectangle& r) {
                          const double w = r.upper[0] - r.lower[0];
                          return dimension_ == 1 ? w : w * (r.upper[1] - r.lower[1]);
                        },
                        [&](const Disk& d) { return dimension_ == 1 ? 2.0 * d.radius : pi * d.radius * d.radius; },
                        [&](const Ellipse& e) { return pi * e.semi_x * e.semi_y; },
                        [&](const LShape& l) { return 0.75 * l.size * l.size; },
                        [&](const Polygon& p) {
                          double a = 0.0;
                          const auto& v = p.vertices;
                          for (std::size_t i = 0; i < v.size(); ++i) {
                            const auto& q = v[(i + 1) % v.size()];
                            a += v[i][0] * q[1] - q[0] * v[i][1];
                          }
                          return 0.5 * std::fabs(a);
                        },
                        [&](const DiskUnion&) -> double {
                          throw GeometryError("disk union volume has no closed form");
                        },
                    },
                    primitive_);
}

double Shape::perimeter() const {
  constexpr double pi = std::numbers::pi;
  return std::visit(Overloaded{
                        [&](const Rectangle& r) {
                          if (dimension_ == 1) return 2.0;
                          return 2.0 * ((r.upper[0] - r.lower[0]) + (r.upper[1] - r.lower[1]));
                        },
                        [&](const Disk& d) { return dimension_ == 1 ? 2.0 : 2.0 * pi * d.radius; },
                        [&](const Ellipse& e) {
                          // Ramanujan's second approximation.
                          const double a = e.semi_x;
                          const double b = e.semi_y;
                          const double hh = (a - b) * (a - b) / ((a + b) * (a + b));
                          return pi * (a + b) * (1.0 + 3.0 * hh / (10.0 + std::sqrt(4.0 - 3.0 * hh)));
                        },
                        [&](const LShape& l) { return 4.0 * l.size; },
                        [&](const Polygon& p) {
                          double s = 0.0;
                          const auto& v = p.vertices;
                          for (std::size_t i = 0; i < v.size(); ++i) {
                            const auto& q = v[(i + 1) % v.size()];
                            s += norm(q[0] - v[i][0], q[1] - v[i][1]);
                          }
                          return s;
                        },
                        [&](const DiskUnion&) -> double {
                          throw GeometryError("disk union perimeter has no closed form");
                        },
                    },
                    primitive_);
}

Shape Shape::blown_up(const Point& c, double k, std::optional<Box> window) const {
  if (!(k > 0.0)) throw GeometryError("blow-up scale must be positive");
  Primitive p = std::visit(
      Overloaded{
          [&](const Rectangle& r) -> Primitive { return Rectangle{map_point(r.lower, c, k), map_point(r.upper, c, k)}; },
          [&](const Disk& d) -> Primitive { return Disk{map_point(d.center, c, k), d.radius / k}; },
          [&](const Ellipse& e) -> Primitive {
            return Ellipse{map_point(e.center, c, k), e.semi_x / k, e.semi_y / k};
          },
          [&](const LShape& l) -> Primitive { return LShape{map_point(l.origin, c, k), l.size / k}; },
          [&](const Polygon& poly) -> Primitive {
            Polygon out;
            for (const auto& v : poly.vertices) out.vertices.push_back(map_point(v, c, k));
            return out;
          },
          [&](const DiskUnion& u) -> Primitive {
            DiskUnion out;
            for (const auto& d : u.disks) out.disks.push_back(Disk{map_point(d.center, c, k), d.radius / k});
            for (const auto& n : u.necks)
              out.necks.push_back(Capsule{map_point(n.a, c, k), map_point(n.b, c, k), n.radius / k});
            return out;
          },
      },
      primitive_);
  Shape out(std::move(p), dimension_);
  if (dimension_ == 1) {
    if (auto* r = std::get_if<Rectangle>(&out.primitive_)) r->lower[1] = r->upper[1] = 0.0;
    if (auto* d = std::get_if<Disk>(&out.primitive_)) d->center[1] = 0.0;
  }
  std::optional<Box> clip;
  if (clip_) clip = Box{map_point(clip_->lo, c, k), map_point(clip_->hi, c, k)};
  if (window) {
    if (!clip) {
      clip = window;
    } else {
      for (int a = 0; a < 2; ++a) {
        clip->lo[a] = std::max(clip->lo[a], window->lo[a]);
        clip->hi[a] = std::min(clip->hi[a], window->hi[a]);
      }
    }
  }
  out.clip_ = clip;
  return out;
}

Shape Shape::translated(const Point& shift) const {
  Shape out = blown_up({-shift[0], -shift[1]}, 1.0);
  return out;
}

std::string Shape::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Rectangle& r) {
                   if (dimension_ == 1) os << "interval(" << r.lower[0] << "," << r.upper[0] << ")";
                   else
                     os << "rectangle(" << r.lower[0] << "," << r.lower[1] << "," << r.upper[0] << "," << r.upper[1]
                        << ")";
                 },
                 [&](const Disk& d) {
                   if (dimension_ == 1) os << "interval(" << d.center[0] - d.radius << "," << d.center[0] + d.radius << ")";
                   else os << "disk(" << d.center[0] << "," << d.center[1] << "," << d.radius << ")";
                 },
                 [&](const Ellipse& e) {
                   os << "ellipse(" << e.center[0] << "," << e.center[1] << "," << e.semi_x << "," << e.semi_y << ")";
                 },
                 [&](const LShape& l) { os << "lshape(" << l.origin[0] << "," << l.origin[1] << "," << l.size << ")"; },
                 [&](const Polygon& p) {
                   os << "polygon(";
                   for (std::size_t i = 0; i < p.vertices.size(); ++i)
                     os << (i ? "," : "") << p.vertices[i][0] << "," << p.vertices[i][1];
                   os << ")";
                 },
                 [&](const DiskUnion& u) {
                   os << "disk_union(";
                   for (std::size_t i = 0; i < u.disks.size(); ++i)
                     os << (i ? ";" : "") << "disk " << u.disks[i].center[0] << "," << u.disks[i].center[1] << ","
                        << u.disks[i].radius;
                   for (const auto& n : u.necks)
                     os << ";neck " << n.a[0] << "," << n.a[1] << "," << n.b[0] << "," << n.b[1] << "," << n.radius;
                   os << ")";
                 },
             },
             primitive_);
  if (clip_) os << " clipped to [" << clip_->lo[0] << "," << clip_->hi[0] << "]x[" << clip_->lo[1] << "," << clip_->hi[1] << "]";
  return os.str();
}

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2) throw GeometryError("grid dimension must be 1 or 2");
  if (!(h > 0.0)) throw GeometryError("grid spacing must be positive");
  if (extents[0] < 3 || (dimension == 2 && extents[1] < 3))
    throw GeometryError("grid extents too small (need at least 3 nodes per axis)");
  if (dimension == 1 && extents[1] != 1) throw GeometryError("one-dimensional grid must have a single row");
}

Point GridSpec::node(int idx) const {
  const int i = ix(idx);
  const int j = iy(idx);
  return {origin[0] + i * h, dimension == 1 ? origin[1] : origin[1] + j * h};
}

double GridSpec::cell_volume() const { return dimension == 1 ? h : h * h; }

GridSpec make_grid(const Shape& shape, double h) { return make_grid(shape, h, shape.anchor()); }

GridSpec make_grid(const Shape& shape, double h, const Point& anchor) {
  if (!(h > 0.0)) throw GeometryError("grid spacing must be positive");
  const Box b = shape.bounding_box();
  GridSpec g;
  g.dimension = shape.dimension();
  g.h = h;
  for (int a = 0; a < g.dimension; ++a) {
    const long lo = static_cast<long>(std::floor((b.lo[a] - anchor[a]) / h)) - 1;
    const long hi = static_cast<long>(std::ceil((b.hi[a] - anchor[a]) / h)) + 1;
    const long count = hi - lo + 1;
    if (count > 200000) throw GeometryError("grid too large along one axis");
    g.origin[a] = anchor[a] + lo * h;
    g.extents[a] = static_cast<int>(count);
  }
  if (g.dimension == 1) {
    g.origin[1] = 0.0;
    g.extents[1] = 1;
  }
  g.validate();
  return g;
}

GridDomain::GridDomain(Shape shape, GridSpec grid, std::optional<BlowUpMap> map)
    : shape_(std::move(shape)), grid_(grid), map_(map) {
  grid_.validate();
  if (shape_.dimension() != grid_.dimension) throw GeometryError("shape and grid dimensions differ");
  const int nx = grid_.extents[0];
  const int ny = grid_.extents[1];
  const int n = static_cast<int>(grid_.node_count());
  mask_.assign(n, 0);
  for (int idx = 0; idx < n; ++idx) {
    const int i = grid_.ix(idx);
    const int j = grid_.iy(idx);
    const bool ring = i == 0 || i == nx - 1 || (grid_.dimension == 2 && (j == 0 || j == ny - 1));
    if (!ring && shape_.contains(grid_.node(idx))) mask_[idx] = 1;
  }

  // Connected components with the 4-neighbourhood.
  std::vector<int> comp(n, -1);
  std::vector<int> sizes;
  for (int s = 0; s < n; ++s) {
    if (!mask_[s] || comp[s] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    std::queue<int> q;
    q.push(s);
    comp[s] = id;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      ++sizes[id];
      const int i = grid_.ix(c);
      const int j = grid_.iy(c);
      const int nbs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& nb : nbs) {
        if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny) continue;
        const int t = grid_.index(nb[0], nb[1]);
        if (mask_[t] && comp[t] < 0) {
          comp[t] = id;
          q.push(t);
        }
      }
    }
  }
  if (sizes.empty()) throw GeometryError("degenerate grid: no interior nodes");
  if (sizes.size() > 1) {
    if (!map_) {
      throw GeometryError("degenerate grid: interior splits into " + std::to_string(sizes.size()) +
                          " components; refine h");
    }
    // Blow-up windows may cut a domain apart; keep the piece holding y = 0.
    const int keep = comp[nearest_node({0.0, 0.0})];
    if (keep < 0) throw GeometryError("degenerate grid: blow-up origin is not interior");
    for (int idx = 0; idx < n; ++idx)
      if (comp[idx] != keep) mask_[idx] = 0;
  }

  dof_of_node_.assign(n, -1);
  for (int idx = 0; idx < n; ++idx) {
    if (mask_[idx]) {
      dof_of_node_[idx] = static_cast<int>(node_of_dof_.size());
      node_of_dof_.push_back(idx);
    }
  }
  dist_ = distance_field(*this);
}

int GridDomain::nearest_node(const Point& p) const {
  int i = static_cast<int>(std::lround((p[0] - grid_.origin[0]) / grid_.h));
  i = std::clamp(i, 0, grid_.extents[0] - 1);
  int j = 0;
  if (grid_.dimension == 2) {
    j = static_cast<int>(std::lround((p[1] - grid_.origin[1]) / grid_.h));
    j = std::clamp(j, 0, grid_.extents[1] - 1);
  }
  return grid_.index(i, j);
}

double GridDomain::distance_at(const Point& p) const {
  if (shape_.has_exact_distance()) return shape_.exact_distance(p);
  const double fx = (p[0] - grid_.origin[0]) / grid_.h;
  const int i0 = static_cast<int>(std::floor(fx));
  const double tx = fx - i0;
  auto value = [&](int i, int j) {
    if (i < 0 || i >= grid_.extents[0] || j < 0 || j >= grid_.extents[1]) return 0.0;
    return dist_[grid_.index(i, j)];
  };
  if (grid_.dimension == 1) return (1 - tx) * value(i0, 0) + tx * value(i0 + 1, 0);
  const double fy = (p[1] - grid_.origin[1]) / grid_.h;
  const int j0 = static_cast<int>(std::floor(fy));
  const double ty = fy - j0;
  return (1 - tx) * (1 - ty) * value(i0, j0) + tx * (1 - ty) * value(i0 + 1, j0) +
         (1 - tx) * ty * value(i0, j0 + 1) + tx * ty * value(i0 + 1, j0 + 1);
}

DomainPtr build_domain(const Shape& shape, const GridSpec& grid) {
  return std::make_shared<const GridDomain>(shape, grid);
}

std::vector<double> distance_field(const GridDomain& domain) {
  const GridSpec& g = domain.grid();
  const auto& mask = domain.interior_mask();
  if (!domain.shape().has_exact_distance()) return chamfer_distance(domain.shape(), g, mask);
  std::vector<double> d(g.node_count(), 0.0);
  for (std::size_t idx = 0; idx < d.size(); ++idx)
    if (mask[idx]) d[idx] = domain.shape().exact_distance(g.node(static_cast<int>(idx)));
  return d;
}

std::vector<double> chamfer_distance(const Shape& shape, const GridSpec& g, const std::vector<std::uint8_t>& mask) {
  const int nx = g.extents[0];
  const int ny = g.extents[1];
  const int n = static_cast<int>(g.node_count());
  std::vector<double> d(n, kInf);
  std::vector<Point> nearest(n, Point{kInf, kInf});
  auto node_inside = [&](int i, int j) {
    return i >= 0 && i < nx && j >= 0 && j < ny && mask[g.index(i, j)];
  };

  // Seeds: boundary crossings on segments from interior nodes to exterior neighbours.
  for (int idx = 0; idx < n; ++idx) {
    if (!mask[idx]) continue;
    const int i = g.ix(idx);
    const int j = g.iy(idx);
    const Point p = g.node(idx);
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if ((di == 0 && dj == 0) || (g.dimension == 1 && dj != 0)) continue;
        if (node_inside(i + di, j + dj)) continue;
        const Point q{p[0] + di * g.h, p[1] + dj * g.h};
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (shape.contains({p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1])})) lo = mid;
          else hi = mid;
        }
        const double t = 0.5 * (lo + hi);
        const Point b{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
        const double dist = norm(b[0] - p[0], b[1] - p[1]);
        if (dist < d[idx]) {
          d[idx] = dist;
          nearest[idx] = b;
        }
      }
    }
  }

  auto relax = [&](int i, int j, int ni, int nj) {
    if (!node_inside(ni, nj)) return;
    const int a = g.index(i, j);
    const int b = g.index(ni, nj);
    if (!std::isfinite(d[b])) return;
    const Point p = g.node(a);
    const double cand = norm(nearest[b][0] - p[0], nearest[b][1] - p[1]);
    if (cand < d[a]) {
      d[a] = cand;
      nearest[a] = nearest[b];
    }
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    // Forward pass.
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!mask[g.index(i, j)]) continue;
        relax(i, j, i - 1, j);
        relax(i, j, i - 1, j - 1);
        relax(i, j, i, j - 1);
        relax(i, j, i + 1, j - 1);
      }
      for (int i = nx - 1; i >= 0; --i)
        if (mask[g.index(i, j)]) relax(i, j, i + 1, j);
    }
    // Backward pass.
    for (int j = ny - 1; j >= 0; --j) {
      for (int i = nx - 1; i >= 0; --i) {
        if (!mask[g.index(i, j)]) continue;
        relax(i, j, i + 1, j);
        relax(i, j, i + 1, j + 1);
        relax(i, j, i, j + 1);
        relax(i, j, i - 1, j + 1);
      }
      for (int i = 0; i < nx; ++i)
        if (mask[g.index(i, j)]) relax(i, j, i - 1, j);
    }
  }

  for (int idx = 0; idx < n; ++idx) {
    if (!mask[idx]) d[idx] = 0.0;
    else if (shape.clip()) d[idx] = std::min(d[idx], box_distance(*shape.clip(), g.node(idx), g.dimension));
  }
  return d;
}

Incenter incenter(const GridDomain& domain) {
  const auto& dist = domain.dist();
  double dmax = -1.0;
  for (int k = 0; k < domain.dof_count(); ++k) dmax = std::max(dmax, dist[domain.node_of_dof(k)]);
  const double tol = 1e-12 * std::max(1.0, dmax);
  std::vector<int> tied;
  Point centroid{0.0, 0.0};
  for (int k = 0; k < domain.dof_count(); ++k) {
    const int node = domain.node_of_dof(k);
    if (dist[node] >= dmax - tol) {
      tied.push_back(node);
      const Point p = domain.grid().node(node);
      centroid[0] += p[0];
      centroid[1] += p[1];
    }
  }
  centroid[0] /= tied.size();
  centroid[1] /= tied.size();
  int best = tied.front();
  double best_gap = kInf;
  for (int node : tied) {
    const Point p = domain.grid().node(node);
    const double gap = norm(p[0] - centroid[0], p[1] - centroid[1]);
    if (gap < best_gap - 1e-12 * domain.h()) {
      best_gap = gap;
      best = node;
    }
  }
  return {domain.grid().node(best), dist[best], best};
}

double ball_radius(int dimension, double eps) {
  if (!(eps > 0.0)) throw GeometryError("ball measure must be positive");
  return measure_radius(dimension, eps);
}

std::vector<int> admissible_centers(const GridDomain& domain, double eps) {
  const double r = ball_radius(domain.dimension(), eps);
  const double threshold = r * (1.0 - 1e-12);
  std::vector<int> out;
  for (int k = 0; k < domain.dof_count(); ++k) {
    const int node = domain.node_of_dof(k);
    if (domain.dist()[node] >= threshold) out.push_back(node);
  }
  if (out.empty()) throw GeometryError("epsilon too large for domain");
  return out;
}

bool admissible(const GridDomain& domain, const Point& center, double eps) {
  const double r = ball_radius(domain.dimension(), eps);
  return domain.distance_at(center) >= r * (1.0 - 1e-12);
}

double default_blowup_window(const GridDomain& domain, const Point& center, double k, double decay_rate) {
  return std::min(domain.distance_at(center) / k, 12.0 / decay_rate);
}

DomainPtr blow_up_domain(const GridDomain& domain, const Point& center, double k, double window,
                         const BlowUpOptions& options) {
  if (!(k > 0.0)) throw GeometryError("blow-up scale must be positive");
  if (!(window > 0.0)) throw GeometryError("blow-up window must be positive");
  if (!domain.shape().contains(center)) throw GeometryError("blow-up center is not interior");
  const double hb = options.h > 0.0 ? options.h : domain.h() / k;
  const int dim = domain.dimension();
  Box win{{-window, dim == 2 ? -window : 0.0}, {window, dim == 2 ? window : 0.0}};
  const Shape s = domain.shape().blown_up(center, k, win);
  Point anchor{0.0, 0.0};
  if (options.lattice_aligned) anchor = map_point(domain.grid().origin, center, k);
  if (dim == 1) anchor[1] = 0.0;

  const Box b = s.bounding_box();
  double nodes = 1.0;
  for (int a = 0; a < dim; ++a) nodes *= (b.hi[a] - b.lo[a]) / hb + 3.0;
  const double need = nodes * options.bytes_per_node;
  if (need > options.memory_budget_bytes) {
    char msg[256];
    std::snprintf(msg, sizeof msg, "blow-up window needs %.0f MB for %.0f nodes; budget is %.0f MB",
                  need / 1e6, nodes, options.memory_budget_bytes / 1e6);
    throw GeometryError(msg);
  }
  const GridSpec g = make_grid(s, hb, anchor);
  return std::make_shared<const GridDomain>(s, g, BlowUpMap{center, k});
}

}  // namespace bbeig
