#include "fracsem/fraclap.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fracsem/error.hpp"
#include "fracsem/io.hpp"

namespace fracsem {

double cns(int n, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::OrderOutOfRange, "fractional order must lie in (0,1)");
  }
  if (n < 1) throw Error(ErrorCode::Validation, "dimension must be positive");
  const double half_n = 0.5 * n;
  return std::tgamma(half_n + s) * std::pow(4.0, s) /
         (std::abs(std::tgamma(-s)) * std::pow(std::numbers::pi, half_n));
}

FracParams make_params(int n, double s) {
  if (n != 1 && n != 2) throw Error(ErrorCode::Validation, "dimension must be 1 or 2");
  return FracParams{n, s, cns(n, s)};
}

double tail_mass(const FracParams& params, double r_eff) {
  if (!(r_eff > 0.0)) throw Error(ErrorCode::NonPositiveRadius, "tail radius must be positive");
  const double radial = std::pow(r_eff, -2.0 * params.s) / (2.0 * params.s);
  const double sphere = params.n == 1 ? 2.0 : 2.0 * std::numbers::pi;
  return params.cns * sphere * radial;
}

Eigen::MatrixXd NonlocalOperator::system_matrix(std::span<const double> a) const {
  if (a.size() != interior_count()) {
    throw Error(ErrorCode::GridMismatch, "potential length differs from interior count");
  }
  Eigen::MatrixXd m = A_II;
  for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) += tail(i) + a[i];
  return m;
}

NonlocalOperator assemble(const GridPtr& grid, double s) {
  if (!grid) throw Error(ErrorCode::GridMismatch, "no grid");
  NonlocalOperator op;
  op.params = make_params(grid->dim(), s);
  op.grid = grid;
  const auto rows = grid->interior();
  kernels::RowBlock block = kernels::assemble_rows_parallel(*grid, op.kernel(), rows);

  const Eigen::Index ni = block.to_interior.rows();
  const Eigen::VectorXd degree = block.to_interior.rowwise().sum() + block.to_exterior.rowwise().sum();
  op.A_II = -block.to_interior;
  op.A_IE = -block.to_exterior;
  for (Eigen::Index i = 0; i < ni; ++i) op.A_II(i, i) = degree(i);
  op.tail_far = std::move(block.far);
  op.tail_boundary = std::move(block.boundary);
  op.tail = op.tail_far + op.tail_boundary;
  return op;
}

namespace {

void check_field(const NonlocalOperator& op, const Field& u) {
  if (u.grid() != op.grid) throw Error(ErrorCode::GridMismatch, "field lives on another grid");
}

}  // namespace

std::vector<double> apply(const NonlocalOperator& op, const Field& u, double farfield) {
  check_field(op, u);
  const auto ui = u.interior_values();
  const auto ue = u.exterior_values();
  std::vector<double> out(ui.size());
  kernels::apply_parallel(op.A_II, op.A_IE, op.tail, ui, ue, farfield, out);
  return out;
}

LatticeRows lattice_rows(const NonlocalOperator& op, std::span<const std::size_t> nodes) {
  LatticeRows rows;
  rows.nodes.assign(nodes.begin(), nodes.end());
  rows.block = kernels::assemble_rows_parallel(*op.grid, op.kernel(), nodes);
  return rows;
}

std::vector<double> apply_rows(const LatticeRows& rows, const Field& u, double farfield) {
  const Grid& grid = *u.grid();
  const auto& b = rows.block;
  if (static_cast<std::size_t>(b.to_interior.cols()) != grid.interior_count() ||
      static_cast<std::size_t>(b.to_exterior.cols()) != grid.exterior_count()) {
    throw Error(ErrorCode::GridMismatch, "rows were assembled on another grid");
  }
  const auto& interior = grid.interior();
  const auto& exterior = grid.exterior();
  std::vector<double> out(rows.nodes.size());
  const long nr = static_cast<long>(rows.nodes.size());
#pragma omp parallel for schedule(static)
  for (long r = 0; r < nr; ++r) {
    const double u0 = u[rows.nodes[r]];
    double acc = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) acc += b.to_interior(r, k) * (u0 - u[interior[k]]);
    for (std::size_t k = 0; k < exterior.size(); ++k) acc += b.to_exterior(r, k) * (u0 - u[exterior[k]]);
    out[r] = acc + (b.boundary(r) + b.far(r)) * (u0 - farfield);
  }
  return out;
}

namespace {

void matrix_json(std::ostringstream& os, const Eigen::MatrixXd& m) {
  os << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i ? "," : "") << '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << io::format_double(m(i, j));
    os << ']';
  }
  os << ']';
}

}  // namespace

std::string operator_to_json(const NonlocalOperator& op) {
  std::ostringstream os;
  os << "{\"n\":" << op.params.n << ",\"s\":" << io::format_double(op.params.s)
     << ",\"cns\":" << io::format_double(op.params.cns) << ",\"h\":" << io::format_double(op.grid->h())
     << ",\"R\":" << io::format_double(op.grid->R()) << ",\"interior\":[";
  const auto& in = op.grid->interior();
  for (std::size_t k = 0; k < in.size(); ++k) os << (k ? "," : "") << in[k];
  os << "],\"exterior\":[";
  const auto& ex = op.grid->exterior();
  for (std::size_t k = 0; k < ex.size(); ++k) os << (k ? "," : "") << ex[k];
  os << "],\"A_II\":";
  matrix_json(os, op.A_II);
  os << ",\"A_IE\":";
  matrix_json(os, op.A_IE);
  os << ",\"tail\":" << io::json_array(std::span<const double>(op.tail.data(), op.tail.size())) << '}';
  return os.str();
}

}  // namespace fracsem
