#include <doctest.h>

#include <cmath>

#include "fracsem/fraclap.hpp"
#include "fracsem/kernels.hpp"
#include "oracles.hpp"

using namespace fracsem;

namespace {

kernels::KernelParams params(int n, double s) { return {n, s, oracle::cns(n, s)}; }

GridPtr random_grid(oracle::Gen& gen, bool two_d) {
  const double h = std::ldexp(1.0, -gen.integer(two_d ? 2 : 3, two_d ? 3 : 5));
  const double lo = h * gen.integer(-8, -1) * (two_d ? 1 : 2);
  const double hi = h * gen.integer(1, 8) * (two_d ? 1 : 2);
  const auto dom = two_d ? Domain::box(lo, hi, -0.5, 0.5) : Domain::interval(lo, hi);
  return build_grid(dom, h, dom.circumradius() + gen.uniform(0.3, 1.5));
}

}  // namespace

TEST_CASE("serial and parallel assembly agree bitwise") {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = random_grid(gen, trial % 3 == 2);
    const auto kp = params(g->dim(), gen.uniform(0.05, 0.95));
    const auto a = kernels::assemble_rows_serial(*g, kp, g->interior());
    const auto b = kernels::assemble_rows_parallel(*g, kp, g->interior());
    CHECK(a.to_interior == b.to_interior);
    CHECK(a.to_exterior == b.to_exterior);
    CHECK(a.boundary == b.boundary);
    CHECK(a.far == b.far);
    CHECK(a.to_interior.minCoeff() >= 0.0);
    CHECK(a.to_exterior.minCoeff() >= 0.0);
  }
}

TEST_CASE("serial and parallel apply and Neumann sums agree bitwise") {
  oracle::Gen gen(102);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = random_grid(gen, trial % 2 == 1);
    const auto op = assemble(g, gen.uniform(0.1, 0.9));
    const auto ui = gen.vec(g->interior_count(), -1.0, 1.0);
    const auto ue = gen.vec(g->exterior_count(), -1.0, 1.0);
    const double far = gen.uniform(-1.0, 1.0);
    std::vector<double> a(ui.size()), b(ui.size());
    kernels::apply_serial(op.A_II, op.A_IE, op.tail, ui, ue, far, a);
    kernels::apply_parallel(op.A_II, op.A_IE, op.tail, ui, ue, far, b);
    CHECK(a == b);

    const auto u = gen.vec(g->size(), -1.0, 1.0);
    std::vector<std::size_t> at(g->exterior().begin(), g->exterior().end());
    std::vector<double> n1(at.size()), n2(at.size());
    kernels::neumann_serial(*g, op.kernel(), u, at, n1);
    kernels::neumann_parallel(*g, op.kernel(), u, at, n2);
    CHECK(n1 == n2);
  }
}

TEST_CASE("1D singular-cell weight reproduces the near-field integral of a quadratic") {
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double h = 0.1;
    const auto kp = params(1, s);
    // u(y) = y^2: 2u(0) - u(y) - u(-y) = -2y^2
    boost::math::quadrature::tanh_sinh<double> ts;
    const double near =
        -2.0 * kp.cns * ts.integrate([&](double y) { return std::pow(y, 1.0 - 2.0 * s); }, 0.0, 0.5 * h);
    const double discrete = kernels::singular_cell_weight(kp, h) * (-2.0 * h * h);
    CHECK(discrete == doctest::Approx(near).epsilon(1e-10));
  }
}

TEST_CASE("2D singular-cell weight against a Cartesian cell integral") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double s : {0.2, 0.5, 0.8}) {
    const double h = 0.25;
    const auto kp = params(2, s);
    // int over [-h/2, h/2]^2 of |z|^{-2s}: eight triangles 0 < y < x < h/2, y = x t
    const double angular = ts.integrate([&](double t) { return std::pow(1.0 + t * t, -s); }, 0.0, 1.0);
    const double cell = 8.0 * std::pow(0.5 * h, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) * angular;
    const double expected = kp.cns * cell / (4.0 * h * h);
    CHECK(kernels::singular_cell_weight(kp, h) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("1D far tail equals the kernel mass beyond the lattice cells") {
  const auto g = build_grid(Domain::interval(-1.0, 1.0), 0.125, 3.0);
  for (double s : {0.25, 0.5, 0.75}) {
    const auto kp = params(1, s);
    for (double x : {-0.875, 0.0, 0.5}) {
      const double right_edge = g->lattice_max(0) + 0.0625;
      const double left_edge = g->lattice_min(0) - 0.0625;
      auto k = [&](double d) { return std::pow(d, -1.0 - 2.0 * s); };
      const double expected =
          kp.cns * (oracle::integrate_to_inf(k, right_edge - x) + oracle::integrate_to_inf(k, x - left_edge));
      CHECK(kernels::far_tail(*g, kp, {x, 0.0}) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("2D far tail is the mass outside the inscribed remaining disk") {
  const auto g = build_grid(Domain::box(-1.0, 1.0, -1.0, 1.0), 0.25, 3.0);
  const auto kp = params(2, 0.5);
  const double r = 3.0 - std::hypot(0.5, 0.25);
  const double expected =
      kp.cns * 2.0 * std::numbers::pi * oracle::integrate_to_inf([&](double t) { return std::pow(t, -2.0); }, r);
  CHECK(kernels::far_tail(*g, kp, {0.5, 0.25}) == doctest::Approx(expected).epsilon(1e-9));
}
