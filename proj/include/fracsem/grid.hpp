#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracsem {

/// Coordinates of a lattice node. One-dimensional grids use only the first slot.
using Point = std::array<double, 2>;

enum class DomainKind { Interval1D, Box2D };

/**
 * Bounded open domain: an interval (1D) or an axis-aligned box (2D).
 *
 * Upper bounds must exceed lower bounds on every active axis.
 */
struct Domain {
  DomainKind kind = DomainKind::Interval1D;
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};

  static Domain interval(double lo, double hi);
  static Domain box(double x_lo, double x_hi, double y_lo, double y_hi);

  int dim() const { return kind == DomainKind::Interval1D ? 1 : 2; }
  Point center() const;
  /// Largest distance from the center to a point of the closure.
  double circumradius() const;
  double diameter() const { return 2.0 * circumradius(); }
  /// Euclidean distance from p to the closed domain (0 inside).
  double distance(const Point& p) const;
  /// Strictly inside, with every coordinate at least tol away from the boundary.
  bool contains_open(const Point& p, double tol) const;
  /// Inside the closure, up to tol.
  bool contains_closed(const Point& p, double tol) const;
};

enum class NodeLabel { Interior, Exterior };
enum class Region { Interior, Exterior, All };

/// Portion of a boundary lattice point's cell lying inside the domain.
struct BoundaryCell {
  Point lattice_point{};  // the lattice point on the boundary itself
  Point center{};         // midpoint of the inner sub-cell
  double volume = 0.0;
};

/**
 * Uniform lattice restricted to the truncation ball around the domain center.
 *
 * Nodes strictly inside the domain are INTERIOR, nodes outside its closure are
 * EXTERIOR. Lattice points that fall exactly on the boundary are not nodes;
 * they are kept as boundary cells and carry the far-field value in the
 * discrete operator.
 */
class Grid {
public:
  Grid(Domain domain, double h, double R, std::vector<Point> nodes, std::vector<NodeLabel> labels,
       std::vector<BoundaryCell> boundary);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  double h() const { return h_; }
  double R() const { return R_; }
  /// Volume of a full lattice cell, h^n.
  double cell_volume() const;

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  NodeLabel label(std::size_t i) const { return labels_[i]; }
  const std::vector<NodeLabel>& labels() const { return labels_; }

  std::size_t interior_count() const { return interior_.size(); }
  std::size_t exterior_count() const { return exterior_.size(); }
  /// Global indices of interior nodes, in node order.
  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& exterior() const { return exterior_; }
  /// Position of a global node inside interior() or exterior(), according to its label.
  std::size_t local_index(std::size_t global) const { return local_[global]; }

  const std::vector<BoundaryCell>& boundary_cells() const { return boundary_; }

  /// Lower and upper lattice extent along an axis (node coordinates, not cell edges).
  double lattice_min(int axis) const { return extent_min_[axis]; }
  double lattice_max(int axis) const { return extent_max_[axis]; }

private:
  Domain domain_;
  double h_;
  double R_;
  std::vector<Point> nodes_;
  std::vector<NodeLabel> labels_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> exterior_;
  std::vector<std::size_t> local_;
  std::vector<BoundaryCell> boundary_;
  Point extent_min_{};
  Point extent_max_{};
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values on every node of a grid.
class Field {
public:
  Field() = default;
  Field(GridPtr grid, std::vector<double> values);
  /// Zero field.
  explicit Field(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Values on interior nodes, in interior order.
  std::vector<double> interior_values() const;
  std::vector<double> exterior_values() const;
  void set_interior(std::span<const double> v);
  void set_exterior(std::span<const double> v);

  bool same_grid(const Field& other) const { return grid_ == other.grid_; }

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Subset of exterior nodes on which exterior data and measurements live.
class Window {
public:
  Window(GridPtr grid, std::vector<std::size_t> indices);

  const GridPtr& grid() const { return grid_; }
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }

private:
  GridPtr grid_;
  std::vector<std::size_t> indices_;
};

enum class WindowSide { Both, Left, Right };

/// Exterior nodes whose distance to the closed domain lies in [min_distance, max_distance].
Window window_by_distance(const GridPtr& grid, double min_distance, double max_distance,
                          WindowSide side = WindowSide::Both);

GridPtr build_grid(const Domain& domain, double h, double R);

using SpatialFunction = std::function<double(const Point&)>;

Field sample_function(const GridPtr& grid, const SpatialFunction& f, Region region);

/// JSON document {domain, h, R, nodes, labels, values}; doubles at 17 significant digits.
std::string grid_to_json(const Grid& grid, const Field* values = nullptr);

}  // namespace fracsem
