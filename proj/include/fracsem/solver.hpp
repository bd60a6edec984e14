#pragma once

#include <optional>
#include <vector>

#include "fracsem/fraclap.hpp"
#include "fracsem/nonlinearity.hpp"

namespace fracsem {

/// (-Delta)^s u + a u = f in the domain, u = g outside. a and f are interior vectors.
struct LinearProblem {
  std::vector<double> a;
  std::vector<double> f;
  Field g;
};

struct Homogenized {
  Field g_tilde;                  // g outside, zero inside
  std::vector<double> h_source;   // operator applied to g_tilde, on interior nodes
};

Homogenized homogenize(const NonlocalOperator& op, const Field& g);

Field solve_linear(const NonlocalOperator& op, const LinearProblem& p);

struct NewtonConfig {
  int max_iters = 50;
  double residual_tol = 1e-10;
  double damping = 0.5;
  int max_backtracks = 30;
  std::optional<Field> initial_guess;
};

struct NewtonResult {
  Field u;
  std::vector<double> trace;   // sup-norm residual before each step and at the end
  int iterations = 0;
};

NewtonResult solve_semilinear(const NonlocalOperator& op, const Nonlinearity& nl, const Field& g,
                              const NewtonConfig& cfg = {});

/// Semilinear residual (-Delta)^s u + q(x,u) on interior nodes, far-field zero.
std::vector<double> semilinear_residual(const NonlocalOperator& op, const Nonlinearity& nl,
                                        const Field& u);

struct Barrier {
  Field phi;
  double lambda = 0.0;
  double C = 0.0;
  double cutoff_radius = 0.0;
};

/// Smooth cutoff: 1 on the closed domain, 0 beyond cutoff_radius from the center.
double cutoff_profile(const Domain& domain, double cutoff_radius, const Point& x);

/// Barrier phi = eta / lambda built from the cutoff eta; cutoff_radius <= 0 uses the grid radius.
Barrier build_barrier(const NonlocalOperator& op, std::span<const double> a,
                      double cutoff_radius = 0.0);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

BoundCheck check_linf_bound(const Field& u, std::span<const double> f, const Field& g,
                            const Barrier& barrier);

/// u1 >= u2 - 1e-10 at every interior node.
bool check_comparison(const Field& u1, const Field& u2);

}  // namespace fracsem
