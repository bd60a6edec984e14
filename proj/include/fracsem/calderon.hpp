#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fracsem/cauchy.hpp"
#include "fracsem/fraclap.hpp"
#include "fracsem/nonlinearity.hpp"
#include "fracsem/solver.hpp"

namespace fracsem {

/// Per interior node, 16-point Gauss-Legendre average of dq along the segment from u2 to u1.
std::vector<double> mean_potential(const Field& u1, const Field& u2, const Nonlinearity& nl);

/// Linear solve with potential dq_at_ug, zero source and exterior data h.
Field solve_linearized(const NonlocalOperator& op, std::span<const double> dq_at_ug, const Field& h);

/// sqrt(h^n sum v_i^2) over interior nodes.
double weighted_l2(const Grid& grid, std::span<const double> interior_values);

struct LinearizationStudy {
  std::vector<double> eta;
  std::vector<double> e_l2;        // ||w(eta) - u*|| weighted l2
  std::vector<double> e_sup;
  std::vector<double> e_half_l2;   // same at eta / 2
  std::vector<double> e_half_sup;
  std::vector<std::string> status; // "ok" or the error name of a failed solve
};

/// 10^{-1}, 10^{-1.5}, ..., 10^{-4}.
std::vector<double> default_eta_schedule();

inline constexpr double kEtaFloor = 1e-5;

LinearizationStudy linearization_study(const NonlocalOperator& op, const Nonlinearity& nl,
                                       const Field& g, const Field& h,
                                       const std::vector<double>& eta_schedule,
                                       const NewtonConfig& cfg = {});

/// Exterior data on a window: column k of values holds probe k at the window nodes.
struct DnMatrix {
  std::vector<std::size_t> window;
  Eigen::MatrixXd probes;   // window size x probe count
  Eigen::MatrixXd matrix;   // window size x probe count
};

/// Canonical per-node probes: the identity on the window.
Eigen::MatrixXd canonical_probes(const Window& window);

DnMatrix dn_map(const NonlocalOperator& op, std::span<const double> a, const Window& window,
                const Eigen::MatrixXd& probes);

/// Derivative of vec(dn_map(a).matrix) (column-major) with respect to a.
Eigen::MatrixXd dn_jacobian(const NonlocalOperator& op, std::span<const double> a,
                            const Window& window, const Eigen::MatrixXd& probes);

struct RecoveryOptions {
  int max_iters = 500;
  double mu0 = 1e-3;
  double misfit_tol = 1e-30;
  std::vector<double> initial;   // empty: zero potential
};

enum class RecoveryStatus { Converged, MaxIterations, Stagnated };
std::string_view to_string(RecoveryStatus s);

struct RecoveryResult {
  std::vector<double> a;
  double misfit = 0.0;   // ||D(a) - measurements||_F^2 + lambda ||a||^2
  int iterations = 0;
  RecoveryStatus status = RecoveryStatus::Converged;
  std::vector<double> misfit_trace;
};

/// Projected Levenberg-Marquardt on min_{a >= 0} ||D(a) - M||_F^2 + lambda_reg ||a||^2.
RecoveryResult recover_potential(const NonlocalOperator& op, const DnMatrix& measurements,
                                 double lambda_reg, const RecoveryOptions& opts = {});

/// Rows [psi restricted to W; lattice (-Delta)^s psi on W], columns all nodes.
Eigen::MatrixXd uniqueness_matrix(const NonlocalOperator& op, const Window& window);

/// n-th largest singular value of uniqueness_matrix, n = node count (0 if the map is wide).
double strong_uniqueness_probe(const NonlocalOperator& op, const Window& window);

struct BankComparison {
  std::vector<double> distances;   // per probe, sup over trace and neumann
  double max_distance = 0.0;
  bool equal = false;
};

BankComparison compare_cauchy_banks(const CauchyBank& b1, const CauchyBank& b2, double tol);

}  // namespace fracsem
