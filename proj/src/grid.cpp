#include "fracsem/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracsem/error.hpp"
#include "fracsem/io.hpp"

namespace fracsem {

Domain Domain::interval(double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorCode::InvalidDomain, "interval needs upper > lower");
  return Domain{DomainKind::Interval1D, {lo, 0.0}, {hi, 0.0}};
}

Domain Domain::box(double x_lo, double x_hi, double y_lo, double y_hi) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) {
    throw Error(ErrorCode::InvalidDomain, "box needs upper > lower on both axes");
  }
  return Domain{DomainKind::Box2D, {x_lo, y_lo}, {x_hi, y_hi}};
}

Point Domain::center() const {
  return {0.5 * (lower[0] + upper[0]), dim() == 2 ? 0.5 * (lower[1] + upper[1]) : 0.0};
}

double Domain::circumradius() const {
  double r2 = 0.0;
  for (int a = 0; a < dim(); ++a) {
    const double half = 0.5 * (upper[a] - lower[a]);
    r2 += half * half;
  }
  return std::sqrt(r2);
}

double Domain::distance(const Point& p) const {
  double d2 = 0.0;
  for (int a = 0; a < dim(); ++a) {
    const double d = std::max({lower[a] - p[a], 0.0, p[a] - upper[a]});
    d2 += d * d;
  }
  return std::sqrt(d2);
}

bool Domain::contains_open(const Point& p, double tol) const {
  for (int a = 0; a < dim(); ++a) {
    if (!(p[a] > lower[a] + tol && p[a] < upper[a] - tol)) return false;
  }
  return true;
}

bool Domain::contains_closed(const Point& p, double tol) const {
  for (int a = 0; a < dim(); ++a) {
    if (p[a] < lower[a] - tol || p[a] > upper[a] + tol) return false;
  }
  return true;
}

Grid::Grid(Domain domain, double h, double R, std::vector<Point> nodes,
           std::vector<NodeLabel> labels, std::vector<BoundaryCell> boundary)
    : domain_(domain),
      h_(h),
      R_(R),
      nodes_(std::move(nodes)),
      labels_(std::move(labels)),
      boundary_(std::move(boundary)) {
  local_.resize(nodes_.size());
  extent_min_.fill(std::numeric_limits<double>::infinity());
  extent_max_.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (labels_[i] == NodeLabel::Interior) {
      local_[i] = interior_.size();
      interior_.push_back(i);
    } else {
      local_[i] = exterior_.size();
      exterior_.push_back(i);
    }
    for (int a = 0; a < dim(); ++a) {
      extent_min_[a] = std::min(extent_min_[a], nodes_[i][a]);
      extent_max_[a] = std::max(extent_max_[a], nodes_[i][a]);
    }
  }
}

double Grid::cell_volume() const { return dim() == 1 ? h_ : h_ * h_; }

GridPtr build_grid(const Domain& domain, double h, double R) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::NonPositiveSpacing, "grid spacing must be positive");
  }
  if (!(R > domain.circumradius())) {
    std::ostringstream os;
    os << "truncation radius " << R << " does not exceed the domain circumradius "
       << domain.circumradius();
    throw Error(ErrorCode::TruncationTooSmall, os.str());
  }
  const int n = domain.dim();
  for (int a = 0; a < n; ++a) {
    const double cells = (domain.upper[a] - domain.lower[a]) / h;
    if (std::abs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
      throw Error(ErrorCode::SpacingMismatch, "spacing does not divide the domain extent");
    }
  }

  const Point c = domain.center();
  const double tol = 1e-9 * h;
  // Lattice anchored at the lower corner: x = lower + k h.
  std::array<long, 2> kmin{0, 0};
  std::array<long, 2> kmax{0, 0};
  for (int a = 0; a < n; ++a) {
    kmin[a] = static_cast<long>(std::ceil((c[a] - R - domain.lower[a]) / h - 1e-9));
    kmax[a] = static_cast<long>(std::floor((c[a] + R - domain.lower[a]) / h + 1e-9));
  }

  std::vector<Point> nodes;
  std::vector<NodeLabel> labels;
  std::vector<BoundaryCell> boundary;
  const double R2 = (R + tol) * (R + tol);
  const long ky_lo = n == 2 ? kmin[1] : 0;
  const long ky_hi = n == 2 ? kmax[1] : 0;
  for (long kx = kmin[0]; kx <= kmax[0]; ++kx) {
    for (long ky = ky_lo; ky <= ky_hi; ++ky) {
      Point p{domain.lower[0] + static_cast<double>(kx) * h,
              n == 2 ? domain.lower[1] + static_cast<double>(ky) * h : 0.0};
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) r2 += (p[a] - c[a]) * (p[a] - c[a]);
      if (r2 > R2) continue;
      if (domain.contains_open(p, tol)) {
        nodes.push_back(p);
        labels.push_back(NodeLabel::Interior);
      } else if (!domain.contains_closed(p, tol)) {
        nodes.push_back(p);
        labels.push_back(NodeLabel::Exterior);
      } else {
        // On the boundary: record the sub-cell that lies inside the closure.
        BoundaryCell cell;
        cell.lattice_point = p;
        cell.center = p;
        cell.volume = 1.0;
        for (int a = 0; a < n; ++a) {
          const bool at_lo = std::abs(p[a] - domain.lower[a]) <= tol;
          const bool at_hi = std::abs(p[a] - domain.upper[a]) <= tol;
          if (at_lo) {
            cell.center[a] += 0.25 * h;
            cell.volume *= 0.5 * h;
          } else if (at_hi) {
            cell.center[a] -= 0.25 * h;
            cell.volume *= 0.5 * h;
          } else {
            cell.volume *= h;
          }
        }
        boundary.push_back(cell);
      }
    }
  }
  const auto n_interior = std::count(labels.begin(), labels.end(), NodeLabel::Interior);
  if (n_interior == 0) {
    throw Error(ErrorCode::EmptyInterior, "spacing too coarse to place an interior node");
  }
  return std::make_shared<const Grid>(domain, h, R, std::move(nodes), std::move(labels),
                                      std::move(boundary));
}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_ || values_.size() != grid_->size()) {
    throw Error(ErrorCode::GridMismatch, "field length differs from grid node count");
  }
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw Error(ErrorCode::GridMismatch, "field without grid");
  values_.assign(grid_->size(), 0.0);
}

std::vector<double> Field::interior_values() const {
  std::vector<double> out;
  out.reserve(grid_->interior_count());
  for (auto g : grid_->interior()) out.push_back(values_[g]);
  return out;
}

std::vector<double> Field::exterior_values() const {
  std::vector<double> out;
  out.reserve(grid_->exterior_count());
  for (auto g : grid_->exterior()) out.push_back(values_[g]);
  return out;
}

void Field::set_interior(std::span<const double> v) {
  if (v.size() != grid_->interior_count()) {
    throw Error(ErrorCode::GridMismatch, "interior vector length mismatch");
  }
  for (std::size_t k = 0; k < v.size(); ++k) values_[grid_->interior()[k]] = v[k];
}

void Field::set_exterior(std::span<const double> v) {
  if (v.size() != grid_->exterior_count()) {
    throw Error(ErrorCode::GridMismatch, "exterior vector length mismatch");
  }
  for (std::size_t k = 0; k < v.size(); ++k) values_[grid_->exterior()[k]] = v[k];
}

Window::Window(GridPtr grid, std::vector<std::size_t> indices)
    : grid_(std::move(grid)), indices_(std::move(indices)) {
  if (indices_.empty()) throw Error(ErrorCode::EmptyWindow, "window has no nodes");
  for (auto i : indices_) {
    if (i >= grid_->size() || grid_->label(i) != NodeLabel::Exterior) {
      throw Error(ErrorCode::NotExterior, "window index is not an exterior node");
    }
  }
}

Window window_by_distance(const GridPtr& grid, double min_distance, double max_distance,
                          WindowSide side) {
  const auto& dom = grid->domain();
  const double tol = 1e-9 * grid->h();
  std::vector<std::size_t> idx;
  for (auto g : grid->exterior()) {
    const Point& p = grid->node(g);
    const double d = dom.distance(p);
    if (d < min_distance - tol || d > max_distance + tol) continue;
    if (side == WindowSide::Left && !(p[0] < dom.lower[0])) continue;
    if (side == WindowSide::Right && !(p[0] > dom.upper[0])) continue;
    idx.push_back(g);
  }
  return Window(grid, std::move(idx));
}

Field sample_function(const GridPtr& grid, const SpatialFunction& f, Region region) {
  Field out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const bool take = region == Region::All ||
                      (region == Region::Interior && grid->label(i) == NodeLabel::Interior) ||
                      (region == Region::Exterior && grid->label(i) == NodeLabel::Exterior);
    if (!take) continue;
    const double v = f(grid->node(i));
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteSample, "sampled function is not finite at a node");
    }
    out[i] = v;
  }
  return out;
}

std::string grid_to_json(const Grid& grid, const Field* values) {
  using io::format_double;
  const auto& d = grid.domain();
  std::ostringstream os;
  os << "{\"domain\":{\"kind\":\"" << (d.dim() == 1 ? "interval-1d" : "box-2d")
     << "\",\"lower\":[";
  for (int a = 0; a < d.dim(); ++a) os << (a ? "," : "") << format_double(d.lower[a]);
  os << "],\"upper\":[";
  for (int a = 0; a < d.dim(); ++a) os << (a ? "," : "") << format_double(d.upper[a]);
  os << "]},\"h\":" << format_double(grid.h()) << ",\"R\":" << format_double(grid.R())
     << ",\"nodes\":[";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << (i ? "," : "") << '[';
    for (int a = 0; a < d.dim(); ++a) os << (a ? "," : "") << format_double(grid.node(i)[a]);
    os << ']';
  }
  os << "],\"labels\":[";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << (i ? "," : "") << (grid.label(i) == NodeLabel::Interior ? "\"INTERIOR\"" : "\"EXTERIOR\"");
  }
  os << "],\"values\":";
  if (values) {
    os << io::json_array(values->values());
  } else {
    os << "[]";
  }
  os << '}';
  return os.str();
}

}  // namespace fracsem
