#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracsem/grid.hpp"

namespace fracsem {

using ScalarModel = std::function<double(const Point&, double)>;

/**
 * q(x,t) together with its t-derivative and structural constants.
 *
 * mu, delta: growth |q| <= mu (1 + |t|^{delta-1}).
 * b0, r: q/t <= b0 dq for |t| >= r.
 * M0: 0 <= dq <= M0.
 * t_check: upper end of the range on which the superlinearity bound is claimed.
 */
struct Nonlinearity {
  std::string name;
  ScalarModel q;
  ScalarModel dq;
  double mu = 1.0;
  double delta = 2.5;
  double b0 = 0.5;
  double r = 1.0;
  double M0 = 1.0;
  double t_check = 10.0;
};

struct QValue {
  double q = 0.0;
  double dq = 0.0;
};

QValue eval(const Nonlinearity& nl, const Point& x, double t);

/// Built-in models: "zero", "linear" (a t), "saturating-cubic" (a t^3 / (1 + t^2)).
///
/// The coefficient is checked for sign and finiteness at the sample points,
/// and the constants are the tightest closed forms over those samples.
Nonlinearity catalogue(std::string_view name, const SpatialFunction& a,
                       std::span<const Point> samples);
Nonlinearity catalogue(std::string_view name, double a);

/// Whether delta lies in the window (2, (2n - 2s)/(n - 2s)); the upper end is infinite for n <= 2s.
bool delta_admissible(double delta, int n, double s);

enum class Verdict { Pass, Fail, NotApplicable };
std::string_view to_string(Verdict v);

enum class Condition {
  Continuity,
  Growth,
  VanishingRatio,
  Superlinearity,
  DerivativeBound,
  DerivativeConsistency,
};
std::string_view to_string(Condition c);

struct ConditionResult {
  Condition condition = Condition::Continuity;
  Verdict verdict = Verdict::NotApplicable;
  // Smallest slack over the samples; negative means violated.
  double margin = 0.0;
  Point worst_x{};
  double worst_t = 0.0;
  std::size_t samples = 0;
};

struct CheckTolerances {
  double rel = 1e-12;
  double eps = 1e-2;         // allowed |q/t| near zero
  double t_eps = 0.05;       // ... for 0 < |t| <= t_eps
  double fd_step = 1e-5;
  double fd_tol = 1e-7;      // relative to 1 + |q| + |dq|
  std::uint64_t seed = 20240611;
};

struct ConditionReport {
  std::vector<ConditionResult> results;
  double T = 0.0;
  Domain x_box;
  std::size_t n_samples = 0;
  /// Largest (q/t)/dq seen on r <= |t| <= T: the smallest b0 the samples admit.
  double implied_b0 = 0.0;
  /// A bounded derivative caps growth linearly, so a superlinearity constant
  /// below one cannot hold for all |t| >= r.
  bool asymptotic_conflict = false;

  const ConditionResult& at(Condition c) const;
  bool all_pass() const;
};

ConditionReport check_conditions(const Nonlinearity& nl, const Domain& x_box, double T,
                                 std::size_t n_samples, const CheckTolerances& tol = {});

std::string report_to_json(const ConditionReport& report);

}  // namespace fracsem
