#pragma once

// Data-parallel inner loops of the discretization. Every kernel has an OpenMP
// version used by the library and a serial reference kept for tests and the
// benchmark; both must produce identical results.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "fracsem/grid.hpp"

namespace fracsem::kernels {

struct KernelParams {
  int n = 1;
  double s = 0.5;
  double cns = 0.0;
};

/// Nonnegative quadrature weights from a set of evaluation nodes to the lattice.
///
/// Row r describes node rows[r]. The node's own column is zero; the singular
/// cell is folded into the nearest-neighbor weights.
struct RowBlock {
  Eigen::MatrixXd to_interior;  // rows x interior_count
  Eigen::MatrixXd to_exterior;  // rows x exterior_count
  Eigen::VectorXd boundary;     // kernel mass on boundary lattice cells
  Eigen::VectorXd far;          // analytic kernel mass beyond the truncation radius
};

/// Extra nearest-neighbor weight that reproduces the singular cell |y| < h/2
/// through a second difference. Includes the normalization constant.
double singular_cell_weight(const KernelParams& kp, double h);

/// c_{n,s} times the kernel mass outside the lattice, seen from x.
double far_tail(const Grid& grid, const KernelParams& kp, const Point& x);

RowBlock assemble_rows_serial(const Grid& grid, const KernelParams& kp,
                              std::span<const std::size_t> rows);
RowBlock assemble_rows_parallel(const Grid& grid, const KernelParams& kp,
                                std::span<const std::size_t> rows);

/// out_i = -sum_{j != i} A_II(i,j)(u_i - u_j) - sum_k A_IE(i,k)(u_i - u_k) + tail_i (u_i - farfield).
///
/// Uses only the off-diagonal entries of the assembled operator; the difference
/// form annihilates constants exactly.
void apply_serial(const Eigen::MatrixXd& a_ii, const Eigen::MatrixXd& a_ie,
                  const Eigen::VectorXd& tail, std::span<const double> u_interior,
                  std::span<const double> u_exterior, double farfield, std::span<double> out);
void apply_parallel(const Eigen::MatrixXd& a_ii, const Eigen::MatrixXd& a_ie,
                    const Eigen::VectorXd& tail, std::span<const double> u_interior,
                    std::span<const double> u_exterior, double farfield, std::span<double> out);

/// c h^n sum_{interior j} (u(x) - u_j) |x - x_j|^{-n-2s} at each evaluation node.
void neumann_serial(const Grid& grid, const KernelParams& kp, std::span<const double> u,
                    std::span<const std::size_t> at, std::span<double> out);
void neumann_parallel(const Grid& grid, const KernelParams& kp, std::span<const double> u,
                      std::span<const std::size_t> at, std::span<double> out);

}  // namespace fracsem::kernels
