#include "fracsem/cauchy.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "fracsem/error.hpp"
#include "fracsem/io.hpp"

namespace fracsem {

namespace {

void require_far_exterior(const Grid& grid, std::span<const std::size_t> idx) {
  const double tol = 1e-9 * grid.h();
  for (auto i : idx) {
    if (i >= grid.size() || grid.label(i) != NodeLabel::Exterior) {
      throw Error(ErrorCode::NotExterior, "evaluation node is not exterior");
    }
    if (grid.domain().distance(grid.node(i)) <= grid.h() + tol) {
      throw Error(ErrorCode::WindowTouchesBoundary, "evaluation node lies within h of the domain");
    }
  }
}

double kernel(const Point& x, const Point& y, int n, double expo) {
  double d2 = 0.0;
  for (int a = 0; a < n; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
  return std::pow(d2, -0.5 * expo);
}

}  // namespace

std::vector<double> neumann_derivative(const NonlocalOperator& op, const Field& u,
                                       std::span<const std::size_t> x_indices) {
  if (u.grid() != op.grid) throw Error(ErrorCode::GridMismatch, "field lives on another grid");
  require_far_exterior(*op.grid, x_indices);
  std::vector<double> out(x_indices.size());
  kernels::neumann_parallel(*op.grid, op.kernel(), u.values(), x_indices, out);
  return out;
}

double mass_m(const NonlocalOperator& op, std::size_t x_index) {
  const std::size_t idx[] = {x_index};
  return mass_m(op, idx).front();
}

std::vector<double> mass_m(const NonlocalOperator& op, std::span<const std::size_t> x_indices) {
  const Grid& grid = *op.grid;
  require_far_exterior(grid, x_indices);
  const int n = op.params.n;
  const double expo = n + 2.0 * op.params.s;
  std::vector<double> out(x_indices.size());
  for (std::size_t r = 0; r < x_indices.size(); ++r) {
    const Point& x = grid.node(x_indices[r]);
    double acc = 0.0;
    for (auto j : grid.interior()) acc += grid.cell_volume() * kernel(x, grid.node(j), n, expo);
    for (const auto& cell : grid.boundary_cells()) acc += cell.volume * kernel(x, cell.center, n, expo);
    out[r] = op.params.cns * acc;
  }
  return out;
}

IdentityCheck exterior_identity(const NonlocalOperator& op, const Field& u, const Field& g,
                                const Window& window) {
  if (u.grid() != op.grid || g.grid() != op.grid || window.grid() != op.grid) {
    throw Error(ErrorCode::GridMismatch, "inputs live on different grids");
  }
  const auto& w = window.indices();
  require_far_exterior(*op.grid, w);
  Field e0g(op.grid);
  for (auto e : op.grid->exterior()) e0g[e] = g[e];

  const LatticeRows rows = lattice_rows(op, w);
  IdentityCheck out;
  out.lhs = apply_rows(rows, u, 0.0);
  const auto neumann = neumann_derivative(op, u, w);
  const auto m = mass_m(op, w);
  const auto ext = apply_rows(rows, e0g, 0.0);
  out.rhs.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.rhs[k] = neumann[k] - m[k] * u[w[k]] + ext[k];
    out.max_residual = std::max(out.max_residual, std::abs(out.lhs[k] - out.rhs[k]));
  }
  return out;
}

double exterior_identity_check(const NonlocalOperator& op, const Field& u, const Field& g,
                               const Window& window) {
  return exterior_identity(op, u, g, window).max_residual;
}

CauchyDatum make_cauchy_datum(const NonlocalOperator& op, const Nonlinearity& nl, const Field& g,
                              const Window& window, const NewtonConfig& cfg, std::string provenance) {
  const auto solved = solve_semilinear(op, nl, g, cfg);
  CauchyDatum d;
  d.window = window.indices();
  d.provenance = std::move(provenance);
  for (auto i : d.window) d.trace.push_back(g[i]);
  d.neumann = neumann_derivative(op, solved.u, d.window);
  return d;
}

CauchyBank make_cauchy_bank(const NonlocalOperator& op, const Nonlinearity& nl,
                            std::span<const Probe> probes, const Window& window,
                            const NewtonConfig& cfg) {
  CauchyBank bank;
  bank.window = window.indices();
  bank.data.resize(probes.size());
  std::vector<std::exception_ptr> errors(probes.size());
  const long n = static_cast<long>(probes.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      bank.data[k] = make_cauchy_datum(op, nl, probes[k].g, window, cfg, probes[k].id);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return bank;
}

std::string bank_to_json(const CauchyBank& bank) {
  std::ostringstream os;
  os << "{\"window\":[";
  for (std::size_t k = 0; k < bank.window.size(); ++k) os << (k ? "," : "") << bank.window[k];
  os << "],\"data\":[";
  for (std::size_t k = 0; k < bank.data.size(); ++k) {
    const auto& d = bank.data[k];
    os << (k ? "," : "") << "{\"g_id\":\"" << d.provenance << "\",\"trace\":" << io::json_array(d.trace)
       << ",\"neumann\":" << io::json_array(d.neumann) << '}';
  }
  os << "]}";
  return os.str();
}

}  // namespace fracsem
