#include "fracsem/kernels.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "fracsem/error.hpp"
#include "fracsem/quadrature.hpp"

namespace fracsem::kernels {

namespace {

double distance(const Point& a, const Point& b, int n) {
  double d2 = 0.0;
  for (int k = 0; k < n; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(d2);
}

struct RowContext {
  const Grid& grid;
  KernelParams kp;
  double h;
  double vol;
  double exponent;
  double kappa;
  double tol;

  RowContext(const Grid& g, const KernelParams& k)
      : grid(g),
        kp(k),
        h(g.h()),
        vol(g.cell_volume()),
        exponent(k.n + 2.0 * k.s),
        kappa(singular_cell_weight(k, g.h())),
        tol(1e-9 * g.h()) {}

  // Returns -1 on overlap with a distinct node.
  double weight(const Point& x, const Point& y) const {
    const double d = distance(x, y, kp.n);
    if (d < 0.5 * h) return -1.0;
    double w = kp.cns * vol * std::pow(d, -exponent);
    if (std::abs(d - h) <= tol) w += kappa;
    return w;
  }

  // Fills row r; returns false if two distinct nodes overlap.
  bool fill(std::size_t r, std::size_t node, RowBlock& out) const {
    const Point& x = grid.node(node);
    bool ok = true;
    const auto& interior = grid.interior();
    for (std::size_t k = 0; k < interior.size(); ++k) {
      if (interior[k] == node) {
        out.to_interior(r, k) = 0.0;
        continue;
      }
      const double w = weight(x, grid.node(interior[k]));
      ok = ok && w >= 0.0;
      out.to_interior(r, k) = w;
    }
    const auto& exterior = grid.exterior();
    for (std::size_t k = 0; k < exterior.size(); ++k) {
      if (exterior[k] == node) {
        out.to_exterior(r, k) = 0.0;
        continue;
      }
      const double w = weight(x, grid.node(exterior[k]));
      ok = ok && w >= 0.0;
      out.to_exterior(r, k) = w;
    }
    double b = 0.0;
    for (const auto& cell : grid.boundary_cells()) {
      const double w = weight(x, cell.lattice_point);
      ok = ok && w >= 0.0;
      b += w;
    }
    out.boundary(r) = b;
    out.far(r) = far_tail(grid, kp, x);
    return ok;
  }
};

RowBlock allocate(const Grid& grid, std::size_t rows) {
  RowBlock out;
  const auto nr = static_cast<Eigen::Index>(rows);
  out.to_interior.resize(nr, static_cast<Eigen::Index>(grid.interior_count()));
  out.to_exterior.resize(nr, static_cast<Eigen::Index>(grid.exterior_count()));
  out.boundary.resize(nr);
  out.far.resize(nr);
  return out;
}

[[noreturn]] void overlap() {
  throw Error(ErrorCode::SingularOverlap, "two distinct nodes closer than h/2");
}

double apply_row(const Eigen::MatrixXd& a_ii, const Eigen::MatrixXd& a_ie,
                 const Eigen::VectorXd& tail, std::span<const double> ui,
                 std::span<const double> ue, double farfield, Eigen::Index i) {
  const double u0 = ui[i];
  double acc = 0.0;
  for (Eigen::Index j = 0; j < a_ii.cols(); ++j) {
    if (j != i) acc -= a_ii(i, j) * (u0 - ui[j]);
  }
  for (Eigen::Index k = 0; k < a_ie.cols(); ++k) acc -= a_ie(i, k) * (u0 - ue[k]);
  return acc + tail(i) * (u0 - farfield);
}

double neumann_at(const Grid& grid, const KernelParams& kp, std::span<const double> u,
                  std::size_t node) {
  const Point& x = grid.node(node);
  const double scale = kp.cns * grid.cell_volume();
  const double expo = kp.n + 2.0 * kp.s;
  double acc = 0.0;
  for (auto j : grid.interior()) {
    acc += (u[node] - u[j]) * std::pow(distance(x, grid.node(j), kp.n), -expo);
  }
  return scale * acc;
}

}  // namespace

double singular_cell_weight(const KernelParams& kp, double h) {
  const double s = kp.s;
  if (kp.n == 1) {
    return kp.cns * std::pow(0.5 * h, 2.0 - 2.0 * s) / ((2.0 - 2.0 * s) * h * h);
  }
  // Integral of |z|^{-2s} over the unit cell centered at 0, by symmetry over 8 triangles.
  static thread_local double cached_s = -1.0;
  static thread_local double cached_j = 0.0;
  if (s != cached_s) {
    const GaussRule rule = gauss_legendre(32);
    const double a = 0.0;
    const double b = std::numbers::pi / 4.0;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double theta = 0.5 * (b - a) * rule.nodes[q] + 0.5 * (b + a);
      acc += rule.weights[q] * std::pow(0.5 / std::cos(theta), 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    }
    cached_j = 8.0 * 0.5 * (b - a) * acc;
    cached_s = s;
  }
  const double cell_integral = std::pow(h, 2.0 - 2.0 * s) * cached_j;
  return kp.cns * cell_integral / (4.0 * h * h);
}

double far_tail(const Grid& grid, const KernelParams& kp, const Point& x) {
  const double s = kp.s;
  const double h = grid.h();
  if (kp.n == 1) {
    const double left = x[0] - (grid.lattice_min(0) - 0.5 * h);
    const double right = (grid.lattice_max(0) + 0.5 * h) - x[0];
    return kp.cns * (std::pow(left, -2.0 * s) + std::pow(right, -2.0 * s)) / (2.0 * s);
  }
  const Point c = grid.domain().center();
  const double r = distance(x, c, 2);
  const double r_eff = std::max(grid.R() - r, 0.5 * h);
  return kp.cns * 2.0 * std::numbers::pi * std::pow(r_eff, -2.0 * s) / (2.0 * s);
}

RowBlock assemble_rows_serial(const Grid& grid, const KernelParams& kp,
                              std::span<const std::size_t> rows) {
  RowBlock out = allocate(grid, rows.size());
  const RowContext ctx(grid, kp);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!ctx.fill(r, rows[r], out)) overlap();
  }
  return out;
}

RowBlock assemble_rows_parallel(const Grid& grid, const KernelParams& kp,
                                std::span<const std::size_t> rows) {
  RowBlock out = allocate(grid, rows.size());
  const RowContext ctx(grid, kp);
  std::atomic<bool> ok{true};
  const auto nr = static_cast<long>(rows.size());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < nr; ++r) {
    if (!ctx.fill(static_cast<std::size_t>(r), rows[r], out)) ok = false;
  }
  if (!ok) overlap();
  return out;
}

void apply_serial(const Eigen::MatrixXd& a_ii, const Eigen::MatrixXd& a_ie,
                  const Eigen::VectorXd& tail, std::span<const double> u_interior,
                  std::span<const double> u_exterior, double farfield, std::span<double> out) {
  for (Eigen::Index i = 0; i < a_ii.rows(); ++i) {
    out[i] = apply_row(a_ii, a_ie, tail, u_interior, u_exterior, farfield, i);
  }
}

void apply_parallel(const Eigen::MatrixXd& a_ii, const Eigen::MatrixXd& a_ie,
                    const Eigen::VectorXd& tail, std::span<const double> u_interior,
                    std::span<const double> u_exterior, double farfield, std::span<double> out) {
  const long rows = static_cast<long>(a_ii.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) {
    out[i] = apply_row(a_ii, a_ie, tail, u_interior, u_exterior, farfield, i);
  }
}

void neumann_serial(const Grid& grid, const KernelParams& kp, std::span<const double> u,
                    std::span<const std::size_t> at, std::span<double> out) {
  for (std::size_t r = 0; r < at.size(); ++r) out[r] = neumann_at(grid, kp, u, at[r]);
}

void neumann_parallel(const Grid& grid, const KernelParams& kp, std::span<const double> u,
                      std::span<const std::size_t> at, std::span<double> out) {
  const long n = static_cast<long>(at.size());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) out[r] = neumann_at(grid, kp, u, at[r]);
}

}  // namespace fracsem::kernels
