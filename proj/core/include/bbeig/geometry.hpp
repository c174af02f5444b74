#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bbeig {

// Coordinates; the second component is ignored in one dimension.
using Point = std::array<double, 2>;

struct Box {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
};

struct Rectangle {
  Point lower;
  Point upper;
};

struct Disk {
  Point center;
  double radius;
};

struct Ellipse {
  Point center;
  double semi_x;
  double semi_y;
};

// [x0, x0+size]^2 with the upper-right quarter [x0+size/2, x0+size] x [y0+size/2, y0+size] removed.
struct LShape {
  Point origin;
  double size;
};

struct Polygon {
  std::vector<Point> vertices;
};

// Segment thickened by radius.
struct Capsule {
  Point a;
  Point b;
  double radius;
};

struct DiskUnion {
  std::vector<Disk> disks;
  std::vector<Capsule> necks;
};

enum class ShapeTag { rectangle, disk, ellipse, lshape, polygon, disk_union };

std::string to_string(ShapeTag tag);

class Shape {
 public:
  using Primitive = std::variant<Rectangle, Disk, Ellipse, LShape, Polygon, DiskUnion>;

  // In one dimension only Rectangle (the interval [lower.x, upper.x]) and
  // Disk (center.x +- radius) are accepted.
  explicit Shape(Primitive primitive, int dimension = 2);

  static Shape interval(double a, double b);
  static Shape unit_square();
  // Two disks of radii 0.5 and 0.3 joined by a thin horizontal neck.
  static Shape dumbbell();

  ShapeTag tag() const;
  int dimension() const { return dimension_; }
  const Primitive& primitive() const { return primitive_; }
  const std::optional<Box>& clip() const { return clip_; }

  // Open set membership.
  bool contains(const Point& p) const;
  // Closed-form distance to the boundary when one exists for this shape.
  bool has_exact_distance() const;
  double exact_distance(const Point& p) const;

  Box bounding_box() const;
  // Lattice anchor: grid nodes are placed on this point.
  Point anchor() const;

  // Analytic volume and perimeter; rectangle, disk, ellipse, L-shape, polygon.
  double volume() const;
  double perimeter() const;

  // Image under y = (x - center) / k, optionally cut by a box.
  Shape blown_up(const Point& center, double k, std::optional<Box> window = std::nullopt) const;
  Shape translated(const Point& shift) const;

  std::string describe() const;

 private:
  Primitive primitive_;
  int dimension_;
  std::optional<Box> clip_;
};

struct GridSpec {
  int dimension = 2;
  double h = 0.0;
  Point origin{0.0, 0.0};
  std::array<int, 2> extents{1, 1};  // node counts per axis; extents[1] == 1 in 1D

  void validate() const;
  std::size_t node_count() const { return std::size_t(extents[0]) * std::size_t(extents[1]); }
  int index(int i, int j) const { return j * extents[0] + i; }
  int ix(int idx) const { return idx % extents[0]; }
  int iy(int idx) const { return idx / extents[0]; }
  Point node(int idx) const;
  double cell_volume() const;
};

// Grid of spacing h whose nodes include the shape's anchor and whose outer
// ring of nodes lies outside the shape.
GridSpec make_grid(const Shape& shape, double h);
GridSpec make_grid(const Shape& shape, double h, const Point& anchor);

// Affine link between a blow-up domain and the domain it came from.
struct BlowUpMap {
  Point center;
  double k;
  Point to_original(const Point& y) const { return {center[0] + k * y[0], center[1] + k * y[1]}; }
  Point to_blowup(const Point& x) const { return {(x[0] - center[0]) / k, (x[1] - center[1]) / k}; }
};

class GridDomain {
 public:
  GridDomain(Shape shape, GridSpec grid, std::optional<BlowUpMap> map = std::nullopt);

  const Shape& shape() const { return shape_; }
  ShapeTag shape_tag() const { return shape_.tag(); }
  const GridSpec& grid() const { return grid_; }
  int dimension() const { return grid_.dimension; }
  double h() const { return grid_.h; }
  const std::optional<BlowUpMap>& blow_up_map() const { return map_; }

  const std::vector<std::uint8_t>& interior_mask() const { return mask_; }
  bool interior(int node) const { return mask_[node] != 0; }
  const std::vector<double>& dist() const { return dist_; }

  // Unknown numbering of interior nodes, row-major.
  int dof_count() const { return static_cast<int>(node_of_dof_.size()); }
  int dof_of_node(int node) const { return dof_of_node_[node]; }
  int node_of_dof(int dof) const { return node_of_dof_[dof]; }

  // Distance to the boundary at an arbitrary point: closed form where the
  // shape has one, bilinear interpolation of the field otherwise.
  double distance_at(const Point& p) const;
  double discrete_volume() const { return dof_count() * grid_.cell_volume(); }

  // Nearest node (unclamped indices are clamped to the grid).
  int nearest_node(const Point& p) const;

 private:
  Shape shape_;
  GridSpec grid_;
  std::optional<BlowUpMap> map_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> dist_;
  std::vector<int> dof_of_node_;
  std::vector<int> node_of_dof_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr build_domain(const Shape& shape, const GridSpec& grid);

// Per-node distances of the domain's field (closed form or chamfer).
std::vector<double> distance_field(const GridDomain& domain);

// Two-pass 3x3 vector-propagation chamfer seeded with bisected boundary
// crossings. Exposed so exact shapes can be cross-checked against it.
std::vector<double> chamfer_distance(const Shape& shape, const GridSpec& grid,
                                     const std::vector<std::uint8_t>& mask);

struct Incenter {
  Point q;
  double d_max;
  int node;
};

// Argmax of the distance field. Among nodes tied at the maximum the one
// closest to the centroid of the tied set wins, then the smallest index.
Incenter incenter(const GridDomain& domain);

double ball_radius(int dimension, double eps);

// Node indices with dist >= r(eps).
std::vector<int> admissible_centers(const GridDomain& domain, double eps);
bool admissible(const GridDomain& domain, const Point& center, double eps);

struct BlowUpOptions {
  double h = 0.0;  // 0 selects h / k
  // true: nodes are images of the original lattice; false: a node sits at y = 0.
  bool lattice_aligned = false;
  double memory_budget_bytes = 2.0e9;
  double bytes_per_node = 400.0;
};

// Default window half-width min(d(x, boundary)/k, 12/sqrt(lambda0 m_under)).
double default_blowup_window(const GridDomain& domain, const Point& center, double k, double decay_rate);

DomainPtr blow_up_domain(const GridDomain& domain, const Point& center, double k, double window,
                         const BlowUpOptions& options = {});

}  // namespace bbeig
