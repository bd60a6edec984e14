#include "fracsem/calderon.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "fracsem/error.hpp"
#include "fracsem/quadrature.hpp"

namespace fracsem {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd to_vec(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void require_potential(const NonlocalOperator& op, std::span<const double> a) {
  if (a.size() != op.interior_count()) {
    throw Error(ErrorCode::GridMismatch, "potential length differs from interior count");
  }
  for (double v : a) {
    if (!(v >= 0.0)) throw Error(ErrorCode::NegativeCoefficient, "potential must be nonnegative");
  }
}

}  // namespace

std::vector<double> mean_potential(const Field& u1, const Field& u2, const Nonlinearity& nl) {
  if (!u1.same_grid(u2)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  static const GaussRule rule = gauss_legendre(16);
  const Grid& grid = *u1.grid();
  std::vector<double> q;
  q.reserve(grid.interior_count());
  for (auto i : grid.interior()) {
    const Point& x = grid.node(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = 0.5 * (rule.nodes[k] + 1.0);
      acc += 0.5 * rule.weights[k] * nl.dq(x, t * u1[i] + (1.0 - t) * u2[i]);
    }
    q.push_back(acc);
  }
  return q;
}

Field solve_linearized(const NonlocalOperator& op, std::span<const double> dq_at_ug, const Field& h) {
  LinearProblem p;
  p.a.assign(dq_at_ug.begin(), dq_at_ug.end());
  p.f.assign(op.interior_count(), 0.0);
  p.g = h;
  return solve_linear(op, p);
}

double weighted_l2(const Grid& grid, std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(grid.cell_volume() * acc);
}

std::vector<double> default_eta_schedule() {
  std::vector<double> eta;
  for (int k = 2; k <= 8; ++k) eta.push_back(std::pow(10.0, -0.5 * k));
  return eta;
}

LinearizationStudy linearization_study(const NonlocalOperator& op, const Nonlinearity& nl,
                                       const Field& g, const Field& h,
                                       const std::vector<double>& eta_schedule,
                                       const NewtonConfig& cfg) {
  if (eta_schedule.empty()) throw Error(ErrorCode::InvalidRange, "empty eta schedule");
  for (std::size_t k = 0; k < eta_schedule.size(); ++k) {
    if (!(eta_schedule[k] >= kEtaFloor)) {
      throw Error(ErrorCode::InvalidRange, "eta below the difference-quotient floor 1e-5");
    }
    if (k > 0 && !(eta_schedule[k] < eta_schedule[k - 1])) {
      throw Error(ErrorCode::InvalidRange, "eta schedule must be strictly decreasing");
    }
  }
  const Grid& grid = *op.grid;
  const auto ug = solve_semilinear(op, nl, g, cfg).u;
  std::vector<double> dq;
  for (auto i : grid.interior()) dq.push_back(nl.dq(grid.node(i), ug[i]));
  const auto ustar = solve_linearized(op, dq, h).interior_values();

  NewtonConfig perturbed = cfg;
  perturbed.initial_guess = ug;

  const std::size_t m = eta_schedule.size();
  std::vector<double> etas;
  for (double e : eta_schedule) {
    etas.push_back(e);
    etas.push_back(0.5 * e);
  }
  std::vector<double> el2(etas.size()), esup(etas.size());
  std::vector<std::string> status(etas.size(), "ok");
  const long n = static_cast<long>(etas.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const double eta = etas[k];
    try {
      Field gp(op.grid);
      for (auto e : grid.exterior()) gp[e] = g[e] + eta * h[e];
      const auto u = solve_semilinear(op, nl, gp, perturbed).u;
      std::vector<double> diff;
      double sup = 0.0;
      const auto& in = grid.interior();
      for (std::size_t j = 0; j < in.size(); ++j) {
        const double d = (u[in[j]] - ug[in[j]]) / eta - ustar[j];
        diff.push_back(d);
        sup = std::max(sup, std::abs(d));
      }
      el2[k] = weighted_l2(grid, diff);
      esup[k] = sup;
    } catch (const Error& err) {
      status[k] = std::string(to_string(err.code()));
      el2[k] = esup[k] = std::nan("");
    }
  }

  LinearizationStudy out;
  for (std::size_t k = 0; k < m; ++k) {
    out.eta.push_back(eta_schedule[k]);
    out.e_l2.push_back(el2[2 * k]);
    out.e_sup.push_back(esup[2 * k]);
    out.e_half_l2.push_back(el2[2 * k + 1]);
    out.e_half_sup.push_back(esup[2 * k + 1]);
    out.status.push_back(status[2 * k] != "ok" ? status[2 * k] : status[2 * k + 1]);
  }
  return out;
}

Eigen::MatrixXd canonical_probes(const Window& window) {
  const auto n = static_cast<Eigen::Index>(window.size());
  return MatrixXd::Identity(n, n);
}

namespace {

// D(a) = diag(c) P - B U(a) - T P_E with U(a) = S(a)^{-1} (-A_IE P_E).
struct DnModel {
  const NonlocalOperator& op;
  MatrixXd probes;
  MatrixXd B;           // window x interior kernel weights
  MatrixXd fixed;       // diag(c) P - T P_E
  MatrixXd coupling;    // -A_IE P_E

  DnModel(const NonlocalOperator& o, const Window& window, const MatrixXd& p) : op(o), probes(p) {
    const Grid& grid = *op.grid;
    if (window.grid() != op.grid) throw Error(ErrorCode::GridMismatch, "window lives on another grid");
    const auto& w = window.indices();
    if (static_cast<std::size_t>(p.rows()) != w.size() || p.cols() == 0) {
      throw Error(ErrorCode::RankDeficientProbes, "probe matrix does not match the window");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(p);
    qr.setThreshold(1e-10);
    if (qr.rank() < p.cols()) throw Error(ErrorCode::RankDeficientProbes, "probes are linearly dependent");

    MatrixXd pe = MatrixXd::Zero(static_cast<Eigen::Index>(grid.exterior_count()), p.cols());
    for (std::size_t k = 0; k < w.size(); ++k) pe.row(static_cast<Eigen::Index>(grid.local_index(w[k]))) = p.row(k);
    const auto masses = mass_m(op, w);
    const LatticeRows rows = lattice_rows(op, w);
    const auto& b = rows.block;
    B = b.to_interior;
    VectorXd c(static_cast<Eigen::Index>(w.size()));
    for (Eigen::Index r = 0; r < c.size(); ++r) {
      const double degree = b.to_interior.row(r).sum() + b.to_exterior.row(r).sum() + b.boundary(r) + b.far(r);
      c(r) = B.row(r).sum() - masses[r] + degree;
    }
    fixed = c.asDiagonal() * p - b.to_exterior * pe;
    coupling = -op.A_IE * pe;
  }

  MatrixXd eval(std::span<const double> a, MatrixXd* U_out = nullptr,
                Eigen::LLT<MatrixXd>* llt_out = nullptr) const {
    Eigen::LLT<MatrixXd> llt(op.system_matrix(a));
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "system matrix is not positive definite");
    MatrixXd U = llt.solve(coupling);
    MatrixXd D = fixed - B * U;
    if (U_out) *U_out = std::move(U);
    if (llt_out) *llt_out = std::move(llt);
    return D;
  }

  MatrixXd jacobian(std::span<const double> a, MatrixXd* D_out = nullptr) const {
    MatrixXd U;
    Eigen::LLT<MatrixXd> llt;
    MatrixXd D = eval(a, &U, &llt);
    // Z = B S^{-1}; S is symmetric, so Z^T = S^{-1} B^T.
    const MatrixXd Zt = llt.solve(B.transpose());
    const Eigen::Index nw = B.rows();
    const Eigen::Index nk = U.cols();
    const Eigen::Index ni = U.rows();
    MatrixXd J(nw * nk, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index k = 0; k < nk; ++k) J.block(k * nw, i, nw, 1) = Zt.row(i).transpose() * U(i, k);
    }
    if (D_out) *D_out = std::move(D);
    return J;
  }
};

}  // namespace

DnMatrix dn_map(const NonlocalOperator& op, std::span<const double> a, const Window& window,
                const Eigen::MatrixXd& probes) {
  require_potential(op, a);
  const DnModel model(op, window, probes);
  DnMatrix out;
  out.window = window.indices();
  out.probes = probes;
  out.matrix = model.eval(a);
  return out;
}

Eigen::MatrixXd dn_jacobian(const NonlocalOperator& op, std::span<const double> a,
                            const Window& window, const Eigen::MatrixXd& probes) {
  require_potential(op, a);
  const DnModel model(op, window, probes);
  return model.jacobian(a);
}

std::string_view to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Converged: return "converged";
    case RecoveryStatus::MaxIterations: return "max-iterations";
    case RecoveryStatus::Stagnated: return "MisfitStagnation";
  }
  return "unknown";
}

RecoveryResult recover_potential(const NonlocalOperator& op, const DnMatrix& measurements,
                                 double lambda_reg, const RecoveryOptions& opts) {
  if (!(lambda_reg >= 0.0)) throw Error(ErrorCode::Validation, "regularization must be nonnegative");
  const Grid& grid = *op.grid;
  const Window window(op.grid, measurements.window);
  const DnModel model(op, window, measurements.probes);
  const auto ni = static_cast<Eigen::Index>(grid.interior_count());
  const Eigen::Map<const VectorXd> target(measurements.matrix.data(), measurements.matrix.size());
  const double sqrt_lambda = std::sqrt(lambda_reg);

  VectorXd a = VectorXd::Zero(ni);
  if (!opts.initial.empty()) {
    if (opts.initial.size() != static_cast<std::size_t>(ni)) {
      throw Error(ErrorCode::GridMismatch, "initial potential length differs from interior count");
    }
    a = to_vec(opts.initial).cwiseMax(0.0);
  }
  auto span_of = [](const VectorXd& v) { return std::span<const double>(v.data(), v.size()); };
  auto objective = [&](const VectorXd& x, VectorXd* r_out) {
    const MatrixXd D = model.eval(span_of(x));
    VectorXd r(D.size() + (lambda_reg > 0.0 ? ni : 0));
    r.head(D.size()) = Eigen::Map<const VectorXd>(D.data(), D.size()) - target;
    if (lambda_reg > 0.0) r.tail(ni) = sqrt_lambda * x;
    if (r_out) *r_out = r;
    return r.squaredNorm();
  };

  RecoveryResult out;
  VectorXd r;
  double f = objective(a, &r);
  out.misfit_trace.push_back(f);
  double mu = opts.mu0;
  out.status = RecoveryStatus::MaxIterations;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (f < opts.misfit_tol) {
      out.status = RecoveryStatus::Converged;
      break;
    }
    MatrixXd J = model.jacobian(span_of(a));
    if (lambda_reg > 0.0) {
      J.conservativeResize(J.rows() + ni, Eigen::NoChange);
      J.bottomRows(ni) = sqrt_lambda * MatrixXd::Identity(ni, ni);
    }
    const VectorXd grad = J.transpose() * r;
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (a(i) > 0.0 || grad(i) < 0.0) free.push_back(i);
    }
    if (free.empty()) {
      out.status = RecoveryStatus::Converged;
      break;
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    const double scale = std::max(J.colwise().squaredNorm().maxCoeff(), 1e-300);
    MatrixXd aug = MatrixXd::Zero(J.rows() + nf, nf);
    for (Eigen::Index c = 0; c < nf; ++c) aug.col(c).head(J.rows()) = J.col(free[c]);
    aug.bottomRows(nf) = std::sqrt(mu * scale) * MatrixXd::Identity(nf, nf);
    VectorXd rhs = VectorXd::Zero(J.rows() + nf);
    rhs.head(J.rows()) = -r;
    const VectorXd step_free = aug.colPivHouseholderQr().solve(rhs);
    VectorXd step = VectorXd::Zero(ni);
    for (Eigen::Index c = 0; c < nf; ++c) step(free[c]) = step_free(c);

    double alpha = 1.0;
    bool accepted = false;
    for (int b = 0; b < 30; ++b) {
      const VectorXd trial = (a + alpha * step).cwiseMax(0.0);
      VectorXd rt;
      const double ft = objective(trial, &rt);
      if (ft < f) {
        a = trial;
        r = rt;
        f = ft;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++out.iterations;
    out.misfit_trace.push_back(f);
    if (accepted) {
      mu = alpha == 1.0 ? mu / 10.0 : mu * 2.0;
    } else {
      mu *= 10.0;
    }
    if (mu > 1e12) {
      out.status = RecoveryStatus::Stagnated;
      break;
    }
  }
  if (out.status == RecoveryStatus::MaxIterations && f < opts.misfit_tol) {
    out.status = RecoveryStatus::Converged;
  }
  out.a.assign(a.data(), a.data() + a.size());
  out.misfit = f;
  return out;
}

Eigen::MatrixXd uniqueness_matrix(const NonlocalOperator& op, const Window& window) {
  const Grid& grid = *op.grid;
  if (window.grid() != op.grid) throw Error(ErrorCode::GridMismatch, "window lives on another grid");
  const auto& w = window.indices();
  const auto nw = static_cast<Eigen::Index>(w.size());
  const auto n = static_cast<Eigen::Index>(grid.size());
  const LatticeRows rows = lattice_rows(op, w);
  const auto& b = rows.block;
  MatrixXd m = MatrixXd::Zero(2 * nw, n);
  const auto& in = grid.interior();
  const auto& ex = grid.exterior();
  for (Eigen::Index r = 0; r < nw; ++r) {
    m(r, static_cast<Eigen::Index>(w[r])) = 1.0;
    double degree = b.boundary(r) + b.far(r);
    for (std::size_t k = 0; k < in.size(); ++k) {
      m(nw + r, static_cast<Eigen::Index>(in[k])) = -b.to_interior(r, k);
      degree += b.to_interior(r, k);
    }
    for (std::size_t k = 0; k < ex.size(); ++k) {
      m(nw + r, static_cast<Eigen::Index>(ex[k])) = -b.to_exterior(r, k);
      degree += b.to_exterior(r, k);
    }
    m(nw + r, static_cast<Eigen::Index>(w[r])) = degree;
  }
  return m;
}

double strong_uniqueness_probe(const NonlocalOperator& op, const Window& window) {
  const MatrixXd m = uniqueness_matrix(op, window);
  if (m.rows() < m.cols()) return 0.0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues()(m.cols() - 1);
}

BankComparison compare_cauchy_banks(const CauchyBank& b1, const CauchyBank& b2, double tol) {
  if (b1.window != b2.window || b1.data.size() != b2.data.size()) {
    throw Error(ErrorCode::BankMismatch, "banks use different windows or probe counts");
  }
  BankComparison out;
  for (std::size_t k = 0; k < b1.data.size(); ++k) {
    const auto& d1 = b1.data[k];
    const auto& d2 = b2.data[k];
    if (d1.provenance != d2.provenance) {
      throw Error(ErrorCode::BankMismatch, "banks were generated by different probing families");
    }
    double d = 0.0;
    for (std::size_t j = 0; j < d1.trace.size(); ++j) {
      d = std::max({d, std::abs(d1.trace[j] - d2.trace[j]), std::abs(d1.neumann[j] - d2.neumann[j])});
    }
    out.distances.push_back(d);
    out.max_distance = std::max(out.max_distance, d);
  }
  out.equal = out.max_distance <= tol;
  return out;
}

}  // namespace fracsem
