// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fracsem/calderon.hpp"
#include "fracsem/cauchy.hpp"
#include "fracsem/error.hpp"
#include "fracsem/experiment.hpp"
#include "fracsem/fraclap.hpp"
#include "fracsem/nonlinearity.hpp"
#include "fracsem/solver.hpp"

using namespace fracsem;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GridPtr interval_grid(double h, double R) { return build_grid(Domain::interval(-1.0, 1.0), h, R); }

double bump(double x, double c, double w) {
  const double r2 = (x - c) * (x - c) / (w * w);
  return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
}

Field exterior_field(const GridPtr& grid, const std::function<double(double)>& f) {
  return sample_function(grid, [&](const Point& p) { return f(p[0]); }, Region::Exterior);
}

void criterion_getoor() {
  std::vector<double> errs;
  for (int level = 5; level <= 8; ++level) {
    const auto grid = interval_grid(std::ldexp(1.0, -level), 8.0);
    const auto op = assemble(grid, 0.5);
    LinearProblem p{std::vector<double>(grid->interior_count(), 0.0),
                    std::vector<double>(grid->interior_count(), 1.0), Field(grid)};
    const Field u = solve_linear(op, p);
    double e = 0.0;
    for (auto i : grid->interior()) {
      const double x = grid->node(i)[0];
      if (std::abs(x) > 0.9 + 1e-12) continue;
      const double exact = std::sqrt(1.0 - x * x);
      e = std::max(e, std::abs(u[i] - exact) / exact);
    }
    errs.push_back(e);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < errs.size(); ++k) monotone = monotone && errs[k] < errs[k - 1];
  report(1, "Getoor oracle", errs.back() < 0.02 && monotone,
         fmt("sup rel err at h=2^-8: %.3e (< 2e-2); h=2^-5..2^-8: %.3e %.3e %.3e %.3e", errs.back(),
             errs[0], errs[1], errs[2], errs[3]));
}

void criterion_constants() {
  double worst = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    for (int dim : {1, 2}) {
      const auto grid = dim == 1 ? interval_grid(1.0 / 64.0, 4.0)
                                 : build_grid(Domain::box(-1.0, 1.0, -1.0, 1.0), 0.125, 2.0);
      const auto op = assemble(grid, s);
      const Field one(grid, std::vector<double>(grid->size(), 1.0));
      for (double v : apply(op, one, 1.0)) worst = std::max(worst, std::abs(v));
    }
  }
  report(2, "constant annihilation", worst <= 1e-12,
         fmt("max |(-Delta)^s 1| over s in {0.25,0.5,0.75}, 1D and 2D: %.3e (<= 1e-12)", worst));
}

struct PrincipleStats {
  int mp_fail = 0;
  int cmp_fail = 0;
  int linf_fail = 0;
  double min_u = INFINITY;
  double min_barrier = INFINITY;
  double max_ratio = 0.0;
};

void run_principles(const NonlocalOperator& op, int trials, std::uint64_t seed, PrincipleStats& st) {
  const Grid& grid = *op.grid;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const auto d = cli::random_nonnegative_data(op, rng);
    LinearProblem p{d.a, d.f, d.g};
    const Field u = solve_linear(op, p);
    for (auto i : grid.interior()) st.min_u = std::min(st.min_u, u[i]);
    if (*std::min_element(u.values().begin(), u.values().end()) < -1e-10) ++st.mp_fail;

    LinearProblem lower = p;
    for (auto& v : lower.f) v *= unit(rng);
    for (auto e : grid.exterior()) lower.g[e] *= unit(rng);
    if (!check_comparison(u, solve_linear(op, lower))) ++st.cmp_fail;

    const Barrier b = build_barrier(op, d.a);
    const auto lphi = apply(op, b.phi, 0.0);
    for (std::size_t k = 0; k < lphi.size(); ++k) {
      st.min_barrier = std::min(st.min_barrier, lphi[k] + d.a[k] * b.phi[grid.interior()[k]]);
    }
    const auto c = check_linf_bound(u, d.f, d.g, b);
    if (!c.pass) ++st.linf_fail;
    st.max_ratio = std::max(st.max_ratio, c.lhs / c.rhs);
  }
}

void criteria_principles() {
  PrincipleStats st;
  const auto g1 = interval_grid(1.0 / 64.0, 4.0);
  const auto op1 = assemble(g1, 0.5);
  run_principles(op1, 100, 11, st);
  const auto g2 = build_grid(Domain::box(-1.0, 1.0, -1.0, 1.0), 0.25, 2.5);
  const auto op2 = assemble(g2, 0.75);
  run_principles(op2, 100, 12, st);
  report(3, "maximum principle", st.mp_fail == 0,
         fmt("200 trials (1D s=0.5, 2D s=0.75): %d failures, min interior u %.3e (>= -1e-10)", st.mp_fail,
             st.min_u));
  report(4, "comparison principle", st.cmp_fail == 0,
         fmt("200 ordered-data trials: %d ordering violations (tol 1e-10)", st.cmp_fail));
  report(5, "L-infinity estimate", st.linf_fail == 0 && st.min_barrier >= 1.0 - 1e-8,
         fmt("200 trials: %d bound failures, max lhs/rhs %.3f; min barrier residual %.6f (>= 1-1e-8)",
             st.linf_fail, st.max_ratio, st.min_barrier));
}

void criterion_identity() {
  auto g_profile = [](double x) { return bump(x, 2.0, 0.5) + 0.5 * bump(x, -2.25, 0.5); };
  std::vector<double> res;
  for (int level : {7, 8}) {
    const auto grid = interval_grid(std::ldexp(1.0, -level), 4.0);
    const auto op = assemble(grid, 0.5);
    const Field g = exterior_field(grid, g_profile);
    LinearProblem p{std::vector<double>(grid->interior_count(), 0.0),
                    std::vector<double>(grid->interior_count(), 0.0), g};
    const Field u = solve_linear(op, p);
    const Window w = window_by_distance(grid, 0.5, INFINITY);
    res.push_back(exterior_identity_check(op, u, g, w));
  }
  const auto grid = interval_grid(1.0 / 256.0, 8.0);
  const auto op = assemble(grid, 0.5);
  LinearProblem getoor{std::vector<double>(grid->interior_count(), 0.0),
                       std::vector<double>(grid->interior_count(), 1.0), Field(grid)};
  const Field u = solve_linear(op, getoor);
  const double zero_data = exterior_identity_check(op, u, Field(grid), window_by_distance(grid, 0.5, INFINITY));

  const double ratio = res[1] / res[0];
  const bool small = res[1] <= 1e-5;
  const bool halves = ratio >= 0.375 && ratio <= 0.625;
  report(6, "exterior identity", small && halves && zero_data <= 1e-5,
         fmt("bump data: residual %.3e at h=2^-8 (<= 1e-5: %s), ratio h=2^-8/2^-7 %.3f (0.5+-25%%: %s); "
             "zero data: %.3e",
             res[1], small ? "yes" : "no", ratio, halves ? "yes" : "no", zero_data));
}

void criterion_linearization() {
  const auto grid = interval_grid(1.0 / 64.0, 4.0);
  const auto op = assemble(grid, 0.5);
  auto profile = [](double x) { return bump(x, 1.6, 0.5) + bump(x, -1.6, 0.5); };
  const Field g = exterior_field(grid, profile);
  const Field h = g;
  NewtonConfig cfg;
  cfg.residual_tol = 1e-12;
  const auto eta = default_eta_schedule();

  const auto lin = linearization_study(op, catalogue("linear", 1.0), g, h, eta, cfg);
  double lin_max = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) lin_max = std::max({lin_max, lin.e_l2[k], lin.e_sup[k]});

  const auto cub = linearization_study(op, catalogue("saturating-cubic", 1.0), g, h, eta, cfg);
  bool decreasing = true;
  for (std::size_t k = 1; k < eta.size(); ++k) {
    decreasing = decreasing && cub.e_l2[k] < cub.e_l2[k - 1] && cub.e_sup[k] < cub.e_sup[k - 1];
  }
  // Asymptotic range: the smaller half of the schedule.
  std::vector<double> ratios;
  for (std::size_t k = eta.size() / 2; k < eta.size(); ++k) {
    ratios.push_back(cub.e_half_l2[k] / cub.e_l2[k]);
    ratios.push_back(cub.e_half_sup[k] / cub.e_sup[k]);
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = 0.5 * (ratios[(ratios.size() - 1) / 2] + ratios[ratios.size() / 2]);
  report(7, "linearization", lin_max <= 1e-10 && decreasing && median >= 0.4 && median <= 0.6,
         fmt("linear max e %.3e (<= 1e-10); cubic e_l2 %.3e -> %.3e strictly decreasing: %s; median "
             "e(eta/2)/e(eta) %.4f (in [0.4,0.6])",
             lin_max, cub.e_l2.front(), cub.e_l2.back(), decreasing ? "yes" : "no", median));
}

void criterion_newton() {
  const auto grid = interval_grid(1.0 / 128.0, 4.0);
  const auto op = assemble(grid, 0.5);
  const Field g = exterior_field(grid, [](double x) { return 4.0 * (bump(x, 1.6, 0.5) + bump(x, -1.6, 0.5)); });
  NewtonConfig cfg;
  cfg.residual_tol = 1e-11;
  const auto res = solve_semilinear(op, catalogue("saturating-cubic", 1.0), g, cfg);
  const auto& r = res.trace;
  double kappa = 0.0;
  const double floor = 1e-13;
  const std::size_t n = r.size();
  for (std::size_t k = n >= 3 ? n - 3 : 0; k + 1 < n; ++k) {
    if (r[k] > floor && r[k + 1] > floor) kappa = std::max(kappa, r[k + 1] / (r[k] * r[k]));
  }
  std::string trace;
  for (double v : r) trace += fmt(" %.2e", v);
  report(8, "Newton convergence", std::isfinite(kappa) && r.back() <= 1e-10,
         fmt("kappa %.3e over the last three residuals; final %.3e (<= 1e-10); trace%s", kappa, r.back(),
             trace.c_str()));
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return std::sqrt(num / den);
}

void criterion_recovery() {
  const auto grid = interval_grid(0.125, 3.0);
  const auto op = assemble(grid, 0.5);
  const Window w = window_by_distance(grid, 0.5, INFINITY);
  const auto probes = canonical_probes(w);
  std::vector<double> constant(grid->interior_count(), 0.5);
  std::vector<double> bumps, zero(grid->interior_count(), 0.0);
  for (auto i : grid->interior()) {
    const double x = grid->node(i)[0];
    bumps.push_back(0.8 * std::exp(-std::pow((x + 0.5) / 0.25, 2)) + 0.5 * std::exp(-std::pow((x - 0.4) / 0.25, 2)));
  }
  auto recover = [&](const std::vector<double>& truth) {
    return recover_potential(op, dn_map(op, truth, w, probes), 0.0).a;
  };
  const double e_const = relative_l2(recover(constant), constant);
  const double e_bumps = relative_l2(recover(bumps), bumps);
  const auto z = recover(zero);
  const double z_sup = std::abs(*std::max_element(z.begin(), z.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));
  report(9, "inverse recovery", e_const < 0.1 && e_bumps < 0.1 && z_sup <= 1e-6,
         fmt("%zu interior nodes, %zu window probes: rel l2 err const %.3e, two-bump %.3e (< 0.1); zero "
             "potential sup %.3e (<= 1e-6)",
             grid->interior_count(), w.size(), e_const, e_bumps, z_sup));
}

void criterion_uniqueness() {
  const auto grid = interval_grid(0.25, 6.0);
  const auto op = assemble(grid, 0.5);
  auto idx = grid->exterior();
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(grid->node(a)[0]) < std::abs(grid->node(b)[0]);
  });
  std::vector<double> sig;
  std::string line;
  for (std::size_t drop = 0; drop <= 12; drop += 4) {
    const Window w(grid, std::vector<std::size_t>(idx.begin(), idx.end() - static_cast<long>(drop)));
    sig.push_back(strong_uniqueness_probe(op, w));
    line += fmt(" |W|=%zu:%.3e", w.size(), sig.back());
  }
  bool positive = true, monotone = true;
  for (std::size_t k = 0; k < sig.size(); ++k) {
    positive = positive && sig[k] > 0.0;
    if (k > 0) monotone = monotone && sig[k] <= sig[k - 1];
  }
  report(10, "strong uniqueness probe", positive && monotone,
         fmt("%zu nested windows, sigma_min positive: %s, nonincreasing: %s;%s", sig.size(),
             positive ? "yes" : "no", monotone ? "yes" : "no", line.c_str()));
}

void criterion_distinguishability() {
  const auto grid = interval_grid(1.0 / 32.0, 4.0);
  const auto op = assemble(grid, 0.5);
  const Window w = window_by_distance(grid, 0.5, INFINITY);
  std::vector<Probe> probes;
  for (double c : {-2.5, -1.75, 1.75, 2.5}) {
    probes.push_back({fmt("bump@%.2f", c), exterior_field(grid, [c](double x) { return bump(x, c, 0.4); })});
  }
  NewtonConfig cfg;
  const double tol = cfg.residual_tol;
  const auto b05 = make_cauchy_bank(op, catalogue("linear", 0.5), probes, w, cfg);
  const auto b06 = make_cauchy_bank(op, catalogue("linear", 0.6), probes, w, cfg);
  const auto b05b = make_cauchy_bank(op, catalogue("linear", 0.5), probes, w, cfg);
  const auto distinct = compare_cauchy_banks(b05, b06, tol);
  const auto same = compare_cauchy_banks(b05, b05b, tol);
  report(11, "distinguishability", distinct.max_distance >= 100.0 * tol && same.max_distance <= 1e-10,
         fmt("a=0.5 vs 0.6: sup distance %.3e (>= 100 x %.0e); identical potentials: %.3e (<= 1e-10)",
             distinct.max_distance, tol, same.max_distance));
}

template <class F>
void guarded(int id, const char* name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "Getoor oracle", criterion_getoor);
  guarded(2, "constant annihilation", criterion_constants);
  guarded(3, "principles", criteria_principles);
  guarded(6, "exterior identity", criterion_identity);
  guarded(7, "linearization", criterion_linearization);
  guarded(8, "Newton convergence", criterion_newton);
  guarded(9, "inverse recovery", criterion_recovery);
  guarded(10, "strong uniqueness probe", criterion_uniqueness);
  guarded(11, "distinguishability", criterion_distinguishability);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
