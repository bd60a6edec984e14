#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracsem/grid.hpp"
#include "fracsem/kernels.hpp"

namespace fracsem {

struct FracParams {
  int n = 1;
  double s = 0.5;
  double cns = 0.0;
};

/// Gamma(n/2 + s) 4^s / (|Gamma(-s)| pi^{n/2}).
double cns(int n, double s);

FracParams make_params(int n, double s);

/// c_{n,s} times the kernel mass outside a ball of radius r_eff around the
/// evaluation point (both sides of the line in 1D).
double tail_mass(const FracParams& params, double r_eff);

/**
 * Dense discretization of the integral fractional Laplacian on the interior nodes.
 *
 * (A_II u_I + A_IE u_E)_i + tail_i (u_i - farfield) approximates (-Delta)^s u(x_i).
 * The tail collects the kernel mass outside the truncation ball and the mass
 * of boundary lattice cells, both of which see the far-field value.
 */
struct NonlocalOperator {
  FracParams params;
  GridPtr grid;
  Eigen::MatrixXd A_II;
  Eigen::MatrixXd A_IE;
  Eigen::VectorXd tail;
  Eigen::VectorXd tail_far;
  Eigen::VectorXd tail_boundary;

  kernels::KernelParams kernel() const { return {params.n, params.s, params.cns}; }
  std::size_t interior_count() const { return static_cast<std::size_t>(A_II.rows()); }
  /// A_II + diag(tail + a): the matrix of the interior problem with potential a.
  Eigen::MatrixXd system_matrix(std::span<const double> a) const;
};

NonlocalOperator assemble(const GridPtr& grid, double s);

/// Operator applied to u, returned on interior nodes in interior order.
std::vector<double> apply(const NonlocalOperator& op, const Field& u, double farfield);

/// Lattice rows of the operator at arbitrary nodes (typically exterior ones),
/// for evaluating (-Delta)^s u outside the domain.
struct LatticeRows {
  std::vector<std::size_t> nodes;
  kernels::RowBlock block;
};

LatticeRows lattice_rows(const NonlocalOperator& op, std::span<const std::size_t> nodes);

/// (-Delta)^s u at the nodes of rows, lattice quadrature, boundary and far cells at farfield.
std::vector<double> apply_rows(const LatticeRows& rows, const Field& u, double farfield);

/// {params, interior, exterior, A_II, A_IE, tail} with 17-digit doubles.
std::string operator_to_json(const NonlocalOperator& op);

}  // namespace fracsem
