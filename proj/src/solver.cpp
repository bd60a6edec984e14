#include "fracsem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracsem/error.hpp"

namespace fracsem {

namespace {

using Eigen::VectorXd;

VectorXd to_vec(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

VectorXd exterior_vec(const Field& g) {
  const auto e = g.exterior_values();
  return to_vec(e);
}

void require_grid(const NonlocalOperator& op, const Field& f) {
  if (f.grid() != op.grid) throw Error(ErrorCode::GridMismatch, "field lives on another grid");
}

Field assemble_field(const GridPtr& grid, const VectorXd& interior, const Field& g) {
  Field u(grid);
  for (auto e : grid->exterior()) u[e] = g[e];
  const auto& in = grid->interior();
  for (std::size_t k = 0; k < in.size(); ++k) u[in[k]] = interior(static_cast<Eigen::Index>(k));
  return u;
}

double sup_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Homogenized homogenize(const NonlocalOperator& op, const Field& g) {
  require_grid(op, g);
  Homogenized out;
  out.g_tilde = Field(op.grid);
  for (auto e : op.grid->exterior()) out.g_tilde[e] = g[e];
  out.h_source = apply(op, out.g_tilde, 0.0);
  return out;
}

Field solve_linear(const NonlocalOperator& op, const LinearProblem& p) {
  require_grid(op, p.g);
  const std::size_t ni = op.interior_count();
  if (p.a.size() != ni || p.f.size() != ni) {
    throw Error(ErrorCode::GridMismatch, "potential or source length differs from interior count");
  }
  for (double v : p.a) {
    if (!(v >= 0.0)) throw Error(ErrorCode::NegativeCoefficient, "potential must be nonnegative");
  }
  const VectorXd rhs = to_vec(p.f) - op.A_IE * exterior_vec(p.g);
  Eigen::LLT<Eigen::MatrixXd> llt(op.system_matrix(p.a));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "system matrix is not positive definite");
  }
  const VectorXd u = llt.solve(rhs);
  if (!u.allFinite()) throw Error(ErrorCode::SingularSystem, "linear solve produced non-finite values");
  return assemble_field(op.grid, u, p.g);
}

namespace {

struct SemilinearSystem {
  const NonlocalOperator& op;
  const Nonlinearity& nl;
  std::vector<Point> x;
  VectorXd coupling;   // A_IE g_E

  SemilinearSystem(const NonlocalOperator& o, const Nonlinearity& n, const Field& g)
      : op(o), nl(n), coupling(o.A_IE * exterior_vec(g)) {
    for (auto i : op.grid->interior()) x.push_back(op.grid->node(i));
  }

  VectorXd residual(const VectorXd& u) const {
    VectorXd r = op.A_II * u + coupling + op.tail.cwiseProduct(u);
    for (Eigen::Index i = 0; i < u.size(); ++i) r(i) += nl.q(x[i], u(i));
    if (!r.allFinite()) throw Error(ErrorCode::NonFiniteValue, "semilinear residual is not finite");
    return r;
  }

  Eigen::MatrixXd jacobian(const VectorXd& u) const {
    Eigen::MatrixXd j = op.A_II;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double d = nl.dq(x[i], u(i));
      if (d < 0.0) throw Error(ErrorCode::JacobianSingular, "nonlinearity derivative is negative");
      j(i, i) += op.tail(i) + d;
    }
    return j;
  }
};

}  // namespace

NewtonResult solve_semilinear(const NonlocalOperator& op, const Nonlinearity& nl, const Field& g,
                              const NewtonConfig& cfg) {
  require_grid(op, g);
  if (!(cfg.residual_tol > 0.0)) throw Error(ErrorCode::Validation, "residual tolerance must be positive");
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0)) {
    throw Error(ErrorCode::Validation, "damping factor must lie in (0,1)");
  }
  const SemilinearSystem sys(op, nl, g);
  VectorXd u = VectorXd::Zero(static_cast<Eigen::Index>(op.interior_count()));
  if (cfg.initial_guess) {
    require_grid(op, *cfg.initial_guess);
    u = to_vec(cfg.initial_guess->interior_values());
  }

  NewtonResult out;
  VectorXd r = sys.residual(u);
  double norm = sup_norm(r);
  out.trace.push_back(norm);
  while (norm > cfg.residual_tol) {
    if (out.iterations >= cfg.max_iters) {
      throw Error(ErrorCode::NewtonDiverged, "residual above tolerance after the iteration limit");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sys.jacobian(u));
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::JacobianSingular, "Newton Jacobian is not positive definite");
    }
    const VectorXd step = -llt.solve(r);
    double alpha = 1.0;
    bool accepted = false;
    for (int b = 0; b <= cfg.max_backtracks; ++b) {
      const VectorXd trial = u + alpha * step;
      const VectorXd rt = sys.residual(trial);
      const double nt = sup_norm(rt);
      if (nt <= (1.0 - 1e-4 * alpha) * norm || nt <= cfg.residual_tol) {
        u = trial;
        r = rt;
        norm = nt;
        accepted = true;
        break;
      }
      alpha *= cfg.damping;
    }
    if (!accepted) throw Error(ErrorCode::NewtonDiverged, "line search found no residual decrease");
    ++out.iterations;
    out.trace.push_back(norm);
  }
  out.u = assemble_field(op.grid, u, g);
  return out;
}

std::vector<double> semilinear_residual(const NonlocalOperator& op, const Nonlinearity& nl,
                                        const Field& u) {
  auto r = apply(op, u, 0.0);
  const auto& in = op.grid->interior();
  for (std::size_t k = 0; k < in.size(); ++k) r[k] += nl.q(op.grid->node(in[k]), u[in[k]]);
  return r;
}

double cutoff_profile(const Domain& domain, double cutoff_radius, const Point& x) {
  const double rho = domain.distance(x);
  if (rho <= 0.0) return 1.0;
  const double t = rho / (cutoff_radius - domain.circumradius());
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Barrier build_barrier(const NonlocalOperator& op, std::span<const double> a, double cutoff_radius) {
  const Grid& grid = *op.grid;
  const double rc = cutoff_radius > 0.0 ? cutoff_radius : grid.R();
  if (rc > grid.R() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::Validation, "cutoff radius exceeds the truncation radius");
  }
  if (!(rc > grid.domain().circumradius())) {
    throw Error(ErrorCode::NonPositiveLambda, "cutoff support does not contain the domain");
  }
  if (a.size() != grid.interior_count()) {
    throw Error(ErrorCode::GridMismatch, "potential length differs from interior count");
  }
  Field eta(op.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) eta[i] = cutoff_profile(grid.domain(), rc, grid.node(i));
  const auto l = apply(op, eta, 0.0);
  const auto& in = grid.interior();
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < in.size(); ++k) lambda = std::min(lambda, l[k] + a[k] * eta[in[k]]);
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::NonPositiveLambda, "cutoff gives no positive kernel mass; enlarge R");
  }
  Barrier b;
  b.lambda = lambda;
  b.C = 1.0 / lambda;
  b.cutoff_radius = rc;
  b.phi = Field(op.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) b.phi[i] = eta[i] / lambda;
  return b;
}

BoundCheck check_linf_bound(const Field& u, std::span<const double> f, const Field& g,
                            const Barrier& barrier) {
  const Grid& grid = *u.grid();
  BoundCheck c;
  for (auto i : grid.interior()) c.lhs = std::max(c.lhs, std::abs(u[i]));
  double g_sup = 0.0;
  for (auto e : grid.exterior()) g_sup = std::max(g_sup, std::abs(g[e]));
  double f_sup = 0.0;
  for (double v : f) f_sup = std::max(f_sup, std::abs(v));
  c.rhs = g_sup + barrier.C * f_sup;
  c.pass = c.lhs <= c.rhs + 1e-8;
  return c;
}

bool check_comparison(const Field& u1, const Field& u2) {
  if (!u1.same_grid(u2)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  for (auto i : u1.grid()->interior()) {
    if (u1[i] < u2[i] - 1e-10) return false;
  }
  return true;
}

}  // namespace fracsem
