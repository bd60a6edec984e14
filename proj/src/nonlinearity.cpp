#include "fracsem/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracsem/error.hpp"
#include "fracsem/io.hpp"

namespace fracsem {

QValue eval(const Nonlinearity& nl, const Point& x, double t) {
  if (!std::isfinite(t) || !std::isfinite(x[0]) || !std::isfinite(x[1])) {
    throw Error(ErrorCode::NonFiniteValue, "nonlinearity evaluated at a non-finite argument");
  }
  QValue v{nl.q(x, t), nl.dq(x, t)};
  if (!std::isfinite(v.q) || !std::isfinite(v.dq)) {
    throw Error(ErrorCode::NonFiniteValue, "nonlinearity " + nl.name + " returned a non-finite value");
  }
  return v;
}

Nonlinearity catalogue(std::string_view name, const SpatialFunction& a,
                       std::span<const Point> samples) {
  if (name != "zero" && name != "linear" && name != "saturating-cubic") {
    throw Error(ErrorCode::UnknownModel, "unknown nonlinearity model '" + std::string(name) + "'");
  }
  Nonlinearity nl;
  nl.name = std::string(name);
  if (name == "zero") {
    nl.q = [](const Point&, double) { return 0.0; };
    nl.dq = [](const Point&, double) { return 0.0; };
    return nl;
  }
  if (samples.empty()) throw Error(ErrorCode::Validation, "coefficient needs sample points");
  double a_max = 0.0;
  for (const auto& x : samples) {
    const double v = a(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "coefficient is not finite");
    if (v < 0.0) throw Error(ErrorCode::NegativeCoefficient, "coefficient must be nonnegative");
    a_max = std::max(a_max, v);
  }
  const double floor = a_max > 0.0 ? a_max : 1.0;
  if (name == "linear") {
    nl.q = [a](const Point& x, double t) { return a(x) * t; };
    nl.dq = [a](const Point& x, double) { return a(x); };
    nl.mu = floor;
    nl.b0 = 0.9;
    nl.M0 = floor;
    return nl;
  }
  nl.q = [a](const Point& x, double t) { return a(x) * t * t * t / (1.0 + t * t); };
  nl.dq = [a](const Point& x, double t) {
    const double t2 = t * t;
    return a(x) * (3.0 * t2 + t2 * t2) / ((1.0 + t2) * (1.0 + t2));
  };
  // |q| <= a|t| <= a (1 + |t|^{3/2}); max of (3t^2+t^4)/(1+t^2)^2 is 9/8 at t^2 = 3;
  // (q/t)/dq = (1+t^2)/(3+t^2) increases to its value at t_check.
  nl.mu = floor;
  nl.r = 1.0;
  nl.t_check = 10.0;
  const double T2 = nl.t_check * nl.t_check;
  nl.b0 = (1.0 + T2) / (3.0 + T2);
  nl.M0 = 9.0 / 8.0 * floor;
  return nl;
}

Nonlinearity catalogue(std::string_view name, double a) {
  const Point origin{0.0, 0.0};
  return catalogue(name, [a](const Point&) { return a; }, std::span<const Point>(&origin, 1));
}

bool delta_admissible(double delta, int n, double s) {
  if (!(delta > 2.0)) return false;
  if (n <= 2.0 * s) return true;
  return delta < (2.0 * n - 2.0 * s) / (n - 2.0 * s);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Continuity: return "continuity";
    case Condition::Growth: return "growth";
    case Condition::VanishingRatio: return "vanishing-ratio";
    case Condition::Superlinearity: return "superlinearity";
    case Condition::DerivativeBound: return "derivative-bound";
    case Condition::DerivativeConsistency: return "derivative-consistency";
  }
  return "unknown";
}

const ConditionResult& ConditionReport::at(Condition c) const {
  for (const auto& r : results) {
    if (r.condition == c) return r;
  }
  throw Error(ErrorCode::Validation, "condition missing from report");
}

bool ConditionReport::all_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const ConditionResult& r) { return r.verdict != Verdict::Fail; });
}

namespace {

struct Sample {
  Point x{};
  double t = 0.0;
};

struct Evaluated {
  double q = 0.0;
  double dq = 0.0;
  double fd = 0.0;
  bool finite = true;
};

std::vector<Sample> draw(std::mt19937_64& rng, const Domain& box, std::size_t n, double t_lo,
                         double t_hi, bool symmetric) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Sample> out(n);
  for (auto& s : out) {
    for (int a = 0; a < box.dim(); ++a) {
      s.x[a] = box.lower[a] + unit(rng) * (box.upper[a] - box.lower[a]);
    }
    s.t = t_lo + unit(rng) * (t_hi - t_lo);
    if (symmetric && unit(rng) < 0.5) s.t = -s.t;
  }
  return out;
}

std::vector<Evaluated> evaluate(const Nonlinearity& nl, const std::vector<Sample>& samples,
                                double step) {
  std::vector<Evaluated> out(samples.size());
  const long n = static_cast<long>(samples.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) {
    const auto& s = samples[k];
    Evaluated e;
    e.q = nl.q(s.x, s.t);
    e.dq = nl.dq(s.x, s.t);
    e.fd = (nl.q(s.x, s.t + step) - nl.q(s.x, s.t - step)) / (2.0 * step);
    e.finite = std::isfinite(e.q) && std::isfinite(e.dq) && std::isfinite(e.fd);
    out[k] = e;
  }
  return out;
}

// Keeps the smallest slack; ties resolve to the first sample so reports are reproducible.
struct Tracker {
  ConditionResult result;
  bool failed = false;

  explicit Tracker(Condition c) {
    result.condition = c;
    result.margin = std::numeric_limits<double>::infinity();
  }
  void see(const Sample& s, double slack, bool violated) {
    ++result.samples;
    failed = failed || violated;
    if (slack < result.margin) {
      result.margin = slack;
      result.worst_x = s.x;
      result.worst_t = s.t;
    }
  }
  ConditionResult finish() {
    if (result.samples == 0) {
      result.verdict = Verdict::NotApplicable;
      result.margin = 0.0;
    } else {
      result.verdict = failed ? Verdict::Fail : Verdict::Pass;
    }
    return result;
  }
};

}  // namespace

ConditionReport check_conditions(const Nonlinearity& nl, const Domain& x_box, double T,
                                 std::size_t n_samples, const CheckTolerances& tol) {
  if (!(T >= nl.r)) throw Error(ErrorCode::InvalidRange, "check range T must be at least r");
  if (n_samples < 100) throw Error(ErrorCode::InvalidRange, "at least 100 samples are required");

  std::mt19937_64 rng(tol.seed);
  const auto general = draw(rng, x_box, n_samples, -T, T, false);
  const auto small = draw(rng, x_box, n_samples, tol.t_eps * 1e-3, tol.t_eps, true);
  auto large = draw(rng, x_box, n_samples, nl.r, T, true);
  large.front().t = nl.r;
  large.back().t = T;

  const auto eg = evaluate(nl, general, tol.fd_step);
  const auto es = evaluate(nl, small, tol.fd_step);
  const auto el = evaluate(nl, large, tol.fd_step);

  Tracker continuity(Condition::Continuity);
  Tracker growth(Condition::Growth);
  Tracker vanishing(Condition::VanishingRatio);
  Tracker superlinear(Condition::Superlinearity);
  Tracker bound(Condition::DerivativeBound);
  Tracker consistency(Condition::DerivativeConsistency);

  auto see_continuity = [&](const std::vector<Sample>& s, const std::vector<Evaluated>& e) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      continuity.see(s[k], e[k].finite ? 0.0 : -1.0, !e[k].finite);
    }
  };
  see_continuity(general, eg);
  see_continuity(small, es);
  see_continuity(large, el);

  for (std::size_t k = 0; k < general.size(); ++k) {
    const auto& s = general[k];
    const auto& e = eg[k];
    if (!e.finite) continue;
    const double cap = nl.mu * (1.0 + std::pow(std::abs(s.t), nl.delta - 1.0));
    const double g = (cap - std::abs(e.q)) / cap;
    growth.see(s, g, g < -tol.rel);

    const double lo = e.dq;
    const double hi = nl.M0 - e.dq;
    const double scale = std::max(1.0, nl.M0);
    bound.see(s, std::min(lo, hi), lo < -tol.rel * scale || hi < -tol.rel * scale);

    const double allowed = tol.fd_tol * (1.0 + std::abs(e.q) + std::abs(e.dq));
    const double c = allowed - std::abs(e.fd - e.dq);
    consistency.see(s, c, c < 0.0);
  }
  for (std::size_t k = 0; k < small.size(); ++k) {
    if (!es[k].finite) continue;
    const double v = tol.eps - std::abs(es[k].q / small[k].t);
    vanishing.see(small[k], v, v < -tol.rel);
  }

  ConditionReport report;
  for (std::size_t k = 0; k < large.size(); ++k) {
    const auto& e = el[k];
    if (!e.finite) continue;
    const double ratio = e.q / large[k].t;
    const double room = nl.b0 * e.dq - ratio;
    const bool violated = !(ratio > 0.0) || room < -tol.rel * std::max(1.0, std::abs(ratio));
    superlinear.see(large[k], std::min(ratio, room), violated);
    if (e.dq > 0.0) report.implied_b0 = std::max(report.implied_b0, ratio / e.dq);
    else if (ratio > 0.0) report.implied_b0 = std::numeric_limits<double>::infinity();
  }

  report.results = {continuity.finish(), growth.finish(),      vanishing.finish(),
                    superlinear.finish(), bound.finish(), consistency.finish()};
  report.T = T;
  report.x_box = x_box;
  report.n_samples = n_samples;
  report.asymptotic_conflict = nl.b0 < 1.0 && std::isfinite(nl.M0);
  return report;
}

std::string report_to_json(const ConditionReport& report) {
  using io::format_double;
  std::ostringstream os;
  os << "{\"T\":" << format_double(report.T) << ",\"n_samples\":" << report.n_samples
     << ",\"implied_b0\":" << (std::isfinite(report.implied_b0) ? format_double(report.implied_b0) : "null")
     << ",\"asymptotic_conflict\":" << (report.asymptotic_conflict ? "true" : "false")
     << ",\"conditions\":[";
  for (std::size_t k = 0; k < report.results.size(); ++k) {
    const auto& r = report.results[k];
    os << (k ? "," : "") << "{\"name\":\"" << to_string(r.condition) << "\",\"verdict\":\""
       << to_string(r.verdict) << "\",\"margin\":"
       << (std::isfinite(r.margin) ? format_double(r.margin) : "null") << ",\"worst_x\":["
       << format_double(r.worst_x[0]) << ',' << format_double(r.worst_x[1])
       << "],\"worst_t\":" << format_double(r.worst_t) << ",\"samples\":" << r.samples << '}';
  }
  os << "]}";
  return os.str();
}

}  // namespace fracsem
