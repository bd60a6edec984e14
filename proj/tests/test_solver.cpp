#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsem/error.hpp"
#include "fracsem/solver.hpp"
#include "oracles.hpp"

using namespace fracsem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Validation;
}

const Domain unit = Domain::interval(-1.0, 1.0);

Field exterior_bump(const GridPtr& g, double amplitude, double center, double width) {
  return sample_function(g, [=](const Point& p) { return amplitude * oracle::bump(p[0], center, width); },
                         Region::Exterior);
}

std::vector<double> constant(const NonlocalOperator& op, double v) {
  return std::vector<double>(op.interior_count(), v);
}

struct RandomData {
  std::vector<double> a, f;
  Field g;
};

RandomData draw_data(oracle::Gen& gen, const NonlocalOperator& op) {
  RandomData d;
  d.a = gen.vec(op.interior_count(), 0.0, 2.0);
  d.f = gen.vec(op.interior_count(), 0.0, 1.0);
  d.g = Field(op.grid);
  for (int k = 0; k < 3; ++k) {
    const double c = gen.uniform(1.2, 2.8) * (gen.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    const double w = gen.uniform(0.2, 0.5);
    const double amp = gen.uniform(0.0, 2.0);
    for (auto e : op.grid->exterior()) d.g[e] += amp * oracle::bump(op.grid->node(e)[0], c, w);
  }
  return d;
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("homogenization") {
  const auto g = build_grid(unit, 1.0 / 32, 3.0);
  const auto op = assemble(g, 0.5);
  const auto zero = homogenize(op, Field(g));
  for (double v : zero.h_source) CHECK(v == 0.0);
  for (double v : zero.g_tilde.values()) CHECK(v == 0.0);

  const auto data = exterior_bump(g, 1.0, 1.5, 0.25);
  const auto hom = homogenize(op, data);
  for (double v : hom.h_source) CHECK(v < 0.0);
  for (auto i : g->interior()) CHECK(hom.g_tilde[i] == 0.0);
  for (auto e : g->exterior()) CHECK(hom.g_tilde[e] == data[e]);

  const auto a = constant(op, 0.4);
  const auto f = constant(op, 1.0);
  const auto direct = solve_linear(op, {a, f, data});
  std::vector<double> shifted(f);
  for (std::size_t k = 0; k < f.size(); ++k) shifted[k] -= hom.h_source[k];
  auto split = solve_linear(op, {a, shifted, Field(g)});
  for (auto e : g->exterior()) split[e] += hom.g_tilde[e];
  CHECK(sup_diff(direct, split) <= 1e-10);
}

TEST_CASE("Getoor solution of the torsion problem") {
  const auto g = build_grid(unit, std::ldexp(1.0, -8), 8.0);
  const auto op = assemble(g, 0.5);
  const auto u = solve_linear(op, {constant(op, 0.0), constant(op, 1.0), Field(g)});
  for (auto i : g->interior()) {
    const double x = g->node(i)[0];
    if (std::abs(x) <= 0.9) CHECK(std::abs(u[i] - std::sqrt(1 - x * x)) <= 0.02 * std::sqrt(1 - x * x));
  }
}

TEST_CASE("linear solve basics and errors") {
  const auto g = build_grid(unit, 1.0 / 16, 3.0);
  const auto op = assemble(g, 0.3);
  const auto u = solve_linear(op, {constant(op, 2.0), constant(op, 0.0), Field(g)});
  for (double v : u.values()) CHECK(v == 0.0);
  CHECK(code_of([&] { solve_linear(op, {constant(op, -1.0), constant(op, 0.0), Field(g)}); }) ==
        ErrorCode::NegativeCoefficient);
  CHECK(code_of([&] { solve_linear(op, {{1.0}, constant(op, 0.0), Field(g)}); }) == ErrorCode::GridMismatch);
  const auto other = build_grid(unit, 1.0 / 16, 3.0);
  CHECK(code_of([&] { solve_linear(op, {constant(op, 0.0), constant(op, 0.0), Field(other)}); }) ==
        ErrorCode::GridMismatch);
}

TEST_CASE("maximum principle on random nonnegative data") {
  oracle::Gen gen(401);
  const auto g = build_grid(unit, 1.0 / 32, 3.0);
  const auto op = assemble(g, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = draw_data(gen, op);
    std::fill(d.a.begin(), d.a.end(), 1.0);
    const auto u = solve_linear(op, {d.a, d.f, d.g});
    for (auto i : g->interior()) CHECK(u[i] >= -1e-10);
  }
}

TEST_CASE("semilinear reductions") {
  const auto g = build_grid(unit, 1.0 / 32, 3.0);
  const auto op = assemble(g, 0.5);
  const auto data = exterior_bump(g, 1.0, 1.6, 0.5);
  const auto lin = solve_linear(op, {constant(op, 0.0), constant(op, 0.0), data});
  const auto zero = solve_semilinear(op, catalogue("zero", 0.0), data);
  CHECK(sup_diff(lin, zero.u) <= 1e-12);

  const auto trivial = solve_semilinear(op, catalogue("saturating-cubic", 1.0), Field(g));
  for (double v : trivial.u.values()) CHECK(v == 0.0);
  CHECK(trivial.iterations == 0);
}

TEST_CASE("Newton agrees with a shifted fixed-point oracle") {
  const auto g = build_grid(unit, std::ldexp(1.0, -7), 3.0);
  const auto op = assemble(g, 0.5);
  const auto nl = catalogue("saturating-cubic", 1.0);
  const auto data = exterior_bump(g, 1.0, 1.6, 0.5);
  NewtonConfig cfg;
  cfg.residual_tol = 1e-12;
  const auto newton = solve_semilinear(op, nl, data, cfg);

  // u <- (A + M)^{-1}(M u - q(u)) contracts with factor at most M / (lambda_1 + M)
  const double M = nl.M0;
  Field u = data;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> rhs(op.interior_count());
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      const auto i = g->interior()[k];
      rhs[k] = M * u[i] - nl.q(g->node(i), u[i]);
    }
    const auto next = solve_linear(op, {constant(op, M), rhs, data});
    const double change = sup_diff(next, u);
    u = next;
    if (change < 1e-10) break;
  }
  CHECK(sup_diff(u, newton.u) <= 1e-6);
  CHECK(newton.trace.back() <= 1e-12);
}

TEST_CASE("Newton converges quadratically") {
  const auto g = build_grid(unit, 1.0 / 64, 4.0);
  const auto op = assemble(g, 0.5);
  const auto data = exterior_bump(g, 4.0, 1.6, 0.5);
  NewtonConfig cfg;
  cfg.residual_tol = 1e-11;
  const auto res = solve_semilinear(op, catalogue("saturating-cubic", 1.0), data, cfg);
  const auto& t = res.trace;
  REQUIRE(t.size() >= 3);
  CHECK(res.iterations <= 10);
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] < t[k - 1]);
  const std::size_t k = t.size() - 1;
  CHECK(t[k] <= 10.0 * t[k - 1] * t[k - 1] + 1e-13);
}

TEST_CASE("Newton errors") {
  const auto g = build_grid(unit, 1.0 / 16, 3.0);
  const auto op = assemble(g, 0.5);
  const auto data = exterior_bump(g, 1.0, 1.6, 0.5);
  const auto nl = catalogue("saturating-cubic", 1.0);
  NewtonConfig none;
  none.max_iters = 0;
  CHECK(code_of([&] { solve_semilinear(op, nl, data, none); }) == ErrorCode::NewtonDiverged);
  NewtonConfig bad_damping;
  bad_damping.damping = 1.0;
  CHECK(code_of([&] { solve_semilinear(op, nl, data, bad_damping); }) == ErrorCode::Validation);
  Nonlinearity decreasing = nl;
  decreasing.q = [](const Point&, double t) { return -t; };
  decreasing.dq = [](const Point&, double) { return -1.0; };
  CHECK(code_of([&] { solve_semilinear(op, decreasing, data); }) == ErrorCode::JacobianSingular);
  NewtonConfig start;
  start.initial_guess = Field(build_grid(unit, 1.0 / 16, 3.0));
  CHECK(code_of([&] { solve_semilinear(op, nl, data, start); }) == ErrorCode::GridMismatch);
}

TEST_CASE("barrier") {
  const auto g = build_grid(unit, 1.0 / 32, 8.0);
  const auto op = assemble(g, 0.5);
  const auto b0 = build_barrier(op, constant(op, 0.0), 4.0);
  CHECK(b0.lambda > 0.0);
  CHECK(b0.C == doctest::Approx(1.0 / b0.lambda));
  // eta = 0 beyond radius 4 and 1 - eta >= 0, so (-Delta)^s eta(x) >= c int_{|z| > 4} |x - z|^{-2} dz
  double floor = INFINITY;
  for (auto i : g->interior()) {
    const double x = g->node(i)[0];
    auto k = [](double d) { return 1.0 / (d * d); };
    floor = std::min(floor, (oracle::integrate_to_inf(k, 4.0 - x) + oracle::integrate_to_inf(k, 4.0 + x)) /
                                std::numbers::pi);
  }
  CHECK(b0.lambda >= floor * (1.0 - 1e-12));

  oracle::Gen gen(402);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = gen.vec(op.interior_count(), 0.0, 3.0);
    const auto b = build_barrier(op, a, 4.0);
    CHECK(b.lambda >= b0.lambda);
    const auto l = apply(op, b.phi, 0.0);
    for (std::size_t k = 0; k < l.size(); ++k) {
      const auto i = g->interior()[k];
      CHECK(l[k] + a[k] * b.phi[i] >= 1.0 - 1e-8);
      CHECK(b.phi[i] <= b.C * (1 + 1e-15));
    }
    for (double v : b.phi.values()) CHECK(v >= 0.0);
  }
  const auto full = build_barrier(op, constant(op, 0.0));
  CHECK(full.cutoff_radius == 8.0);

  CHECK(code_of([&] { build_barrier(op, constant(op, 0.0), 9.0); }) == ErrorCode::Validation);
  CHECK(code_of([&] { build_barrier(op, constant(op, 0.0), 1.0); }) == ErrorCode::NonPositiveLambda);
  CHECK(code_of([&] { build_barrier(op, std::vector<double>{0.0}, 4.0); }) == ErrorCode::GridMismatch);
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff_profile(unit, 3.0, {0.5, 0.0}) == 1.0);
  CHECK(cutoff_profile(unit, 3.0, {3.0, 0.0}) == 0.0);
  CHECK(cutoff_profile(unit, 3.0, {2.0, 0.0}) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double x = 1.0; x <= 3.5; x += 0.01) {
    const double v = cutoff_profile(unit, 3.0, {x, 0.0});
    CHECK(v <= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
}

TEST_CASE("sup bound") {
  const auto g = build_grid(unit, std::ldexp(1.0, -6), 6.0);
  const auto op = assemble(g, 0.5);
  const auto barrier = build_barrier(op, constant(op, 0.0));
  const auto zero = solve_linear(op, {constant(op, 0.0), constant(op, 0.0), Field(g)});
  const auto c0 = check_linf_bound(zero, constant(op, 0.0), Field(g), barrier);
  CHECK(c0.lhs == 0.0);
  CHECK(c0.rhs == 0.0);
  CHECK(c0.pass);

  const auto getoor = solve_linear(op, {constant(op, 0.0), constant(op, 1.0), Field(g)});
  const auto cg = check_linf_bound(getoor, constant(op, 1.0), Field(g), barrier);
  CHECK(cg.lhs == doctest::Approx(1.0).epsilon(0.02));
  CHECK(cg.rhs == barrier.C);
  CHECK(barrier.C >= 1.0);
  CHECK(cg.pass);

  oracle::Gen gen(403);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = draw_data(gen, op);
    const auto u = solve_linear(op, {d.a, d.f, d.g});
    CHECK(check_linf_bound(u, d.f, d.g, build_barrier(op, d.a)).pass);
  }
}

TEST_CASE("comparison principle") {
  const auto g = build_grid(unit, 1.0 / 32, 3.0);
  const auto op = assemble(g, 0.5);
  oracle::Gen gen(404);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = draw_data(gen, op);
    auto f1 = d.f;
    Field g1 = d.g;
    for (auto& v : f1) v += gen.uniform(0.0, 0.5);
    for (auto e : g->exterior()) g1[e] += 0.3 * oracle::bump(g->node(e)[0], -2.0, 0.5);
    const auto u1 = solve_linear(op, {d.a, f1, g1});
    const auto u2 = solve_linear(op, {d.a, d.f, d.g});
    CHECK(check_comparison(u1, u2));
    CHECK(check_comparison(u2, u2));
  }
  const auto d = draw_data(gen, op);
  auto f1 = d.f;
  for (auto& v : f1) v += 1.0;
  const auto u1 = solve_linear(op, {d.a, f1, d.g});
  const auto u2 = solve_linear(op, {d.a, d.f, d.g});
  for (auto i : g->interior()) CHECK(u1[i] > u2[i]);
  CHECK_FALSE(check_comparison(u2, u1));
  CHECK(code_of([&] { check_comparison(u1, Field(build_grid(unit, 1.0 / 32, 3.0))); }) == ErrorCode::GridMismatch);
}
