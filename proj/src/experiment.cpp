#include "fracsem/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fracsem/cauchy.hpp"
#include "fracsem/error.hpp"
#include "fracsem/io.hpp"

namespace fracsem::cli {

using nlohmann::json;

double Profile::operator()(const Point& x) const {
  double v = 0.0;
  for (const auto& t : terms) {
    if (t.kind == "constant") {
      v += t.value;
      continue;
    }
    const double dx = x[0] - t.center[0];
    const double dy = x[1] - t.center[1];
    const double rho2 = (dx * dx + dy * dy) / (t.width * t.width);
    if (t.kind == "bump") {
      if (rho2 < 1.0) v += t.amplitude * std::exp(1.0 - 1.0 / (1.0 - rho2));
    } else {
      v += t.amplitude * std::exp(-rho2);
    }
  }
  return v;
}

Profile Profile::constant(double v) {
  Profile p;
  ProfileTerm t;
  t.value = v;
  p.terms.push_back(t);
  return p;
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

Point parse_point(const json& j, int dim) {
  Point p{0.0, 0.0};
  if (j.is_number()) {
    p[0] = j.get<double>();
    return p;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dim) invalid("point has the wrong dimension");
  for (int a = 0; a < dim; ++a) p[a] = j.at(a).get<double>();
  return p;
}

ProfileTerm parse_term(const json& j, int dim) {
  ProfileTerm t;
  if (j.is_number()) {
    t.value = j.get<double>();
    return t;
  }
  if (!j.is_object()) invalid("profile term must be a number or an object");
  t.kind = get_or<std::string>(j, "kind", "constant");
  if (t.kind == "constant") {
    t.value = get_or<double>(j, "value", 0.0);
  } else if (t.kind == "bump" || t.kind == "gaussian") {
    if (!j.contains("center")) invalid(t.kind + " profile needs a center");
    t.center = parse_point(j.at("center"), dim);
    t.width = get_or<double>(j, "width", 1.0);
    t.amplitude = get_or<double>(j, "amplitude", 1.0);
    if (!(t.width > 0.0)) invalid("profile width must be positive");
  } else {
    invalid("unknown profile kind '" + t.kind + "'");
  }
  return t;
}

Profile parse_profile(const json& j, int dim) {
  Profile p;
  if (j.is_array()) {
    for (const auto& t : j) p.terms.push_back(parse_term(t, dim));
  } else {
    p.terms.push_back(parse_term(j, dim));
  }
  return p;
}

json profile_json(const Profile& p) {
  json arr = json::array();
  for (const auto& t : p.terms) {
    if (t.kind == "constant") {
      arr.push_back({{"kind", "constant"}, {"value", t.value}});
    } else {
      arr.push_back({{"kind", t.kind},
                     {"center", {t.center[0], t.center[1]}},
                     {"width", t.width},
                     {"amplitude", t.amplitude}});
    }
  }
  return arr;
}

const std::vector<std::string> kExperiments = {"solve", "forward", "principles",
                                               "linearize", "recover", "probe"};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigParse, "config must be a JSON object");

  ExperimentConfig c;
  c.experiment = get_or<std::string>(j, "experiment", "");
  if (!c.experiment.empty() &&
      std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    invalid("unknown experiment '" + c.experiment + "'");
  }

  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    const auto kind = get_or<std::string>(d, "kind", "interval-1d");
    const auto lo = d.value("lower", json::array({-1.0}));
    const auto hi = d.value("upper", json::array({1.0}));
    if (kind == "interval-1d") {
      if (lo.size() != 1 || hi.size() != 1) invalid("interval bounds need one coordinate");
      c.domain = Domain::interval(lo.at(0).get<double>(), hi.at(0).get<double>());
    } else if (kind == "box-2d") {
      if (lo.size() != 2 || hi.size() != 2) invalid("box bounds need two coordinates");
      c.domain = Domain::box(lo.at(0).get<double>(), hi.at(0).get<double>(), lo.at(1).get<double>(),
                             hi.at(1).get<double>());
    } else {
      invalid("unknown domain kind '" + kind + "'");
    }
  }
  const int dim = c.domain.dim();
  c.s = get_or<double>(j, "s", c.s);
  c.h = get_or<double>(j, "h", c.h);
  c.R = get_or<double>(j, "R", c.R);

  if (j.contains("nonlinearity")) {
    const auto& n = j.at("nonlinearity");
    if (n.is_string()) {
      c.nonlinearity = n.get<std::string>();
    } else {
      c.nonlinearity = get_or<std::string>(n, "name", "zero");
      if (n.contains("coefficient")) c.coefficient = parse_profile(n.at("coefficient"), dim);
    }
  }
  if (j.contains("potential")) c.potential = parse_profile(j.at("potential"), dim);
  if (j.contains("source")) c.source = parse_profile(j.at("source"), dim);
  if (j.contains("g")) c.g = parse_profile(j.at("g"), dim);
  if (j.contains("h_dir")) c.h_dir = parse_profile(j.at("h_dir"), dim);

  if (j.contains("window")) {
    const auto& w = j.at("window");
    c.window_min = get_or<double>(w, "min_distance", c.window_min);
    c.window_max = get_or<double>(w, "max_distance", c.window_max);
    const auto side = get_or<std::string>(w, "side", "both");
    if (side == "both") c.window_side = WindowSide::Both;
    else if (side == "left") c.window_side = WindowSide::Left;
    else if (side == "right") c.window_side = WindowSide::Right;
    else invalid("window side must be both, left or right");
  }
  if (j.contains("eta_schedule")) c.eta_schedule = j.at("eta_schedule").get<std::vector<double>>();
  if (j.contains("newton")) {
    const auto& n = j.at("newton");
    c.newton.max_iters = get_or<int>(n, "max_iters", c.newton.max_iters);
    c.newton.residual_tol = get_or<double>(n, "residual_tol", c.newton.residual_tol);
    c.newton.damping = get_or<double>(n, "damping", c.newton.damping);
  }
  c.regularization = get_or<double>(j, "regularization", c.regularization);
  c.noise = get_or<double>(j, "noise", c.noise);
  c.noise_draws = get_or<int>(j, "noise_draws", c.noise_draws);
  c.recover_iters = get_or<int>(j, "recover_iters", c.recover_iters);
  c.trials = get_or<int>(j, "trials", c.trials);
  c.probe_windows = get_or<int>(j, "probe_windows", c.probe_windows);
  c.probe_step = get_or<int>(j, "probe_step", c.probe_step);
  c.cutoff_radius = get_or<double>(j, "cutoff_radius", c.cutoff_radius);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);

  // Module preconditions, checked before any work is dispatched.
  make_params(dim, c.s);
  if (!(c.h > 0.0)) throw Error(ErrorCode::NonPositiveSpacing, "grid spacing must be positive");
  if (!(c.R > c.domain.circumradius())) {
    throw Error(ErrorCode::TruncationTooSmall, "truncation radius must exceed the domain circumradius");
  }
  if (!(c.newton.residual_tol > 0.0)) invalid("newton residual_tol must be positive");
  if (!(c.newton.damping > 0.0 && c.newton.damping < 1.0)) invalid("newton damping must lie in (0,1)");
  if (c.newton.max_iters < 1) invalid("newton max_iters must be positive");
  if (!(c.regularization >= 0.0)) invalid("regularization must be nonnegative");
  if (!(c.noise >= 0.0)) invalid("noise must be nonnegative");
  if (c.trials < 1 || c.noise_draws < 1 || c.recover_iters < 1) invalid("counts must be positive");
  if (c.probe_windows < 1 || c.probe_step < 1) invalid("probe sweep counts must be positive");
  if (!(c.window_min >= 0.0) || !(c.window_max >= c.window_min)) invalid("window distances are inverted");
  for (std::size_t k = 0; k < c.eta_schedule.size(); ++k) {
    if (!(c.eta_schedule[k] >= kEtaFloor) || (k > 0 && !(c.eta_schedule[k] < c.eta_schedule[k - 1]))) {
      throw Error(ErrorCode::InvalidRange, "eta schedule must be strictly decreasing and at least 1e-5");
    }
  }
  catalogue(c.nonlinearity, 0.0);

  json r;
  r["experiment"] = c.experiment;
  r["domain"] = {{"kind", dim == 1 ? "interval-1d" : "box-2d"},
                 {"lower", dim == 1 ? json::array({c.domain.lower[0]})
                                    : json::array({c.domain.lower[0], c.domain.lower[1]})},
                 {"upper", dim == 1 ? json::array({c.domain.upper[0]})
                                    : json::array({c.domain.upper[0], c.domain.upper[1]})}};
  r["s"] = c.s;
  r["h"] = c.h;
  r["R"] = c.R;
  r["nonlinearity"] = {{"name", c.nonlinearity}, {"coefficient", profile_json(c.coefficient)}};
  r["potential"] = profile_json(c.potential);
  r["source"] = profile_json(c.source);
  r["g"] = profile_json(c.g);
  r["h_dir"] = profile_json(c.h_dir);
  r["window"] = {{"min_distance", c.window_min},
                 {"max_distance", std::isfinite(c.window_max) ? json(c.window_max) : json(nullptr)},
                 {"side", c.window_side == WindowSide::Both   ? "both"
                          : c.window_side == WindowSide::Left ? "left"
                                                              : "right"}};
  r["eta_schedule"] = c.eta_schedule;
  r["newton"] = {{"max_iters", c.newton.max_iters},
                 {"residual_tol", c.newton.residual_tol},
                 {"damping", c.newton.damping}};
  r["regularization"] = c.regularization;
  r["noise"] = c.noise;
  r["noise_draws"] = c.noise_draws;
  r["recover_iters"] = c.recover_iters;
  r["trials"] = c.trials;
  r["probe_windows"] = c.probe_windows;
  r["probe_step"] = c.probe_step;
  r["cutoff_radius"] = c.cutoff_radius;
  r["seed"] = c.seed;
  c.resolved = r.dump();
  return c;
}

RandomData random_nonnegative_data(const NonlocalOperator& op, std::mt19937_64& rng) {
  const Grid& grid = *op.grid;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomData d;
  for (std::size_t k = 0; k < grid.interior_count(); ++k) d.a.push_back(2.0 * unit(rng));
  for (std::size_t k = 0; k < grid.interior_count(); ++k) d.f.push_back(unit(rng));
  const Domain& dom = grid.domain();
  const Point c = dom.center();
  const double inner = dom.circumradius() + 2.0 * grid.h();
  const double outer = grid.R() - 2.0 * grid.h();
  Profile p;
  for (int k = 0; k < 3; ++k) {
    ProfileTerm t;
    t.kind = "bump";
    const double radius = inner + unit(rng) * std::max(outer - inner, 0.0);
    const double angle = 2.0 * 3.141592653589793 * unit(rng);
    if (dom.dim() == 1) {
      t.center = {c[0] + (unit(rng) < 0.5 ? -radius : radius), 0.0};
    } else {
      t.center = {c[0] + radius * std::cos(angle), c[1] + radius * std::sin(angle)};
    }
    const double room = std::max(dom.distance(t.center) - grid.h(), grid.h());
    t.width = std::min(room, 0.25 + 0.75 * unit(rng));
    t.amplitude = unit(rng);
    p.terms.push_back(t);
  }
  d.g = sample_function(op.grid, p, Region::Exterior);
  return d;
}

namespace {

std::vector<std::string> coord_header(int dim, std::initializer_list<std::string> rest) {
  std::vector<std::string> h = {"x"};
  if (dim == 2) h.push_back("y");
  h.insert(h.end(), rest.begin(), rest.end());
  return h;
}

std::vector<double> coord_row(const Grid& grid, std::size_t node, std::initializer_list<double> rest) {
  std::vector<double> r = {grid.node(node)[0]};
  if (grid.dim() == 2) r.push_back(grid.node(node)[1]);
  r.insert(r.end(), rest.begin(), rest.end());
  return r;
}

std::vector<Point> interior_points(const Grid& grid) {
  std::vector<Point> p;
  for (auto i : grid.interior()) p.push_back(grid.node(i));
  return p;
}

std::vector<double> sample_interior(const Grid& grid, const Profile& p) {
  std::vector<double> v;
  for (auto i : grid.interior()) v.push_back(p(grid.node(i)));
  return v;
}

Nonlinearity make_nonlinearity(const ExperimentConfig& c, const Grid& grid) {
  const auto pts = interior_points(grid);
  const Profile coef = c.coefficient;
  return catalogue(c.nonlinearity, [coef](const Point& x) { return coef(x); }, pts);
}

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path out;
  GridPtr grid;
  NonlocalOperator op;
  json manifest_extra = json::object();
  std::vector<std::string> outputs;

  void write_csv(const std::string& name, const io::CsvTable& t) {
    t.write(out / name);
    outputs.push_back(name);
  }
  void write_json(const std::string& name, const std::string& text) {
    io::write_text(out / name, text);
    outputs.push_back(name);
  }
};

void solution_csv(Context& ctx, const Field& u, const std::string& name) {
  const Grid& grid = *ctx.grid;
  io::CsvTable t(coord_header(grid.dim(), {"label", "u"}));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add_row(coord_row(grid, i, {grid.label(i) == NodeLabel::Interior ? 0.0 : 1.0, u[i]}));
  }
  ctx.write_csv(name, t);
}

void run_solve(Context& ctx) {
  const Grid& grid = *ctx.grid;
  LinearProblem p;
  p.a = sample_interior(grid, ctx.cfg.potential);
  p.f = sample_interior(grid, ctx.cfg.source);
  p.g = sample_function(ctx.grid, ctx.cfg.g, Region::Exterior);
  const Field u = solve_linear(ctx.op, p);
  solution_csv(ctx, u, "solution.csv");
  auto r = apply(ctx.op, u, 0.0);
  double res = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) res = std::max(res, std::abs(r[k] + p.a[k] * u[grid.interior()[k]] - p.f[k]));
  ctx.manifest_extra["residual_sup"] = res;
}

void run_forward(Context& ctx) {
  const Grid& grid = *ctx.grid;
  const auto nl = make_nonlinearity(ctx.cfg, grid);
  const Field g = sample_function(ctx.grid, ctx.cfg.g, Region::Exterior);
  const auto res = solve_semilinear(ctx.op, nl, g, ctx.cfg.newton);
  solution_csv(ctx, res.u, "solution.csv");
  io::CsvTable trace({"iteration", "residual"});
  for (std::size_t k = 0; k < res.trace.size(); ++k) trace.add_row({static_cast<double>(k), res.trace[k]});
  ctx.write_csv("newton_trace.csv", trace);

  const Window w = window_by_distance(ctx.grid, ctx.cfg.window_min, ctx.cfg.window_max, ctx.cfg.window_side);
  CauchyDatum d;
  d.window = w.indices();
  d.provenance = "g";
  for (auto i : d.window) d.trace.push_back(g[i]);
  d.neumann = neumann_derivative(ctx.op, res.u, d.window);
  CauchyBank bank{d.window, {d}};
  ctx.write_json("cauchy.json", bank_to_json(bank));
  ctx.manifest_extra["newton_iterations"] = res.iterations;
  ctx.manifest_extra["exterior_identity_residual"] = exterior_identity_check(ctx.op, res.u, g, w);
}

void run_principles(Context& ctx) {
  const Grid& grid = *ctx.grid;
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  io::CsvTable t({"trial", "min_u", "maxprinciple_ok", "comparison_ok", "linf_lhs", "linf_rhs", "linf_ok",
                  "barrier_min"});
  int failures = 0;
  for (int k = 0; k < ctx.cfg.trials; ++k) {
    const auto d = random_nonnegative_data(ctx.op, rng);
    LinearProblem p{d.a, d.f, d.g};
    const Field u = solve_linear(ctx.op, p);
    double min_u = std::numeric_limits<double>::infinity();
    for (auto i : grid.interior()) min_u = std::min(min_u, u[i]);

    LinearProblem p2 = p;
    for (auto& v : p2.f) v += unit(rng);
    for (auto e : grid.exterior()) p2.g[e] += 0.5 * unit(rng) * d.g[e];
    const bool cmp = check_comparison(solve_linear(ctx.op, p2), u);

    const Barrier b = build_barrier(ctx.op, d.a, ctx.cfg.cutoff_radius);
    const auto bound = check_linf_bound(u, d.f, d.g, b);
    const auto lphi = apply(ctx.op, b.phi, 0.0);
    double bmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lphi.size(); ++j) bmin = std::min(bmin, lphi[j] + d.a[j] * b.phi[grid.interior()[j]]);

    const bool mp = min_u >= -1e-10;
    failures += !mp + !cmp + !bound.pass + (bmin < 1.0 - 1e-8);
    t.add_row({static_cast<double>(k), min_u, mp ? 1.0 : 0.0, cmp ? 1.0 : 0.0, bound.lhs, bound.rhs,
               bound.pass ? 1.0 : 0.0, bmin});
  }
  ctx.write_csv("principles.csv", t);
  const auto nl = make_nonlinearity(ctx.cfg, grid);
  CheckTolerances tol;
  tol.seed = ctx.cfg.seed;
  const auto report = check_conditions(nl, grid.domain(), std::max(nl.t_check, nl.r), 1000, tol);
  ctx.write_json("conditions.json", report_to_json(report));
  ctx.manifest_extra["principle_failures"] = failures;
}

void run_linearize(Context& ctx) {
  const auto nl = make_nonlinearity(ctx.cfg, *ctx.grid);
  const Field g = sample_function(ctx.grid, ctx.cfg.g, Region::Exterior);
  const Field h = sample_function(ctx.grid, ctx.cfg.h_dir, Region::Exterior);
  const auto st = linearization_study(ctx.op, nl, g, h, ctx.cfg.eta_schedule, ctx.cfg.newton);
  io::CsvTable t({"eta", "e_l2", "e_sup", "e_half_l2", "e_half_sup", "ratio_l2", "ratio_sup"});
  json status = json::array();
  for (std::size_t k = 0; k < st.eta.size(); ++k) {
    t.add_row({st.eta[k], st.e_l2[k], st.e_sup[k], st.e_half_l2[k], st.e_half_sup[k],
               st.e_half_l2[k] / st.e_l2[k], st.e_half_sup[k] / st.e_sup[k]});
    status.push_back(st.status[k]);
  }
  ctx.write_csv("linearization.csv", t);
  ctx.manifest_extra["solve_status"] = status;
  ctx.manifest_extra["norms"] = "weighted l2 sqrt(h^n sum v^2) and sup over interior nodes";
}

double relative_l2(std::span<const double> est, std::span<const double> truth) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    num += (est[k] - truth[k]) * (est[k] - truth[k]);
    den += truth[k] * truth[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void run_recover(Context& ctx) {
  const Grid& grid = *ctx.grid;
  const auto truth = sample_interior(grid, ctx.cfg.potential);
  const Window w = window_by_distance(ctx.grid, ctx.cfg.window_min, ctx.cfg.window_max, ctx.cfg.window_side);
  const DnMatrix clean = dn_map(ctx.op, truth, w, canonical_probes(w));
  RecoveryOptions opts;
  opts.max_iters = ctx.cfg.recover_iters;
  const auto res = recover_potential(ctx.op, clean, ctx.cfg.regularization, opts);

  io::CsvTable t(coord_header(grid.dim(), {"a_true", "a_estimate"}));
  for (std::size_t k = 0; k < truth.size(); ++k) t.add_row(coord_row(grid, grid.interior()[k], {truth[k], res.a[k]}));
  ctx.write_csv("recovery.csv", t);

  io::CsvTable trace({"iteration", "misfit"});
  for (std::size_t k = 0; k < res.misfit_trace.size(); ++k) trace.add_row({static_cast<double>(k), res.misfit_trace[k]});
  ctx.write_csv("misfit_trace.csv", trace);

  const DnMatrix fitted = dn_map(ctx.op, res.a, w, clean.probes);
  io::CsvTable probes({"probe", "misfit"});
  for (Eigen::Index k = 0; k < clean.matrix.cols(); ++k) {
    probes.add_row({static_cast<double>(k), (fitted.matrix.col(k) - clean.matrix.col(k)).norm()});
  }
  ctx.write_csv("probe_misfit.csv", probes);

  if (ctx.cfg.noise > 0.0) {
    std::mt19937_64 rng(ctx.cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    io::CsvTable noisy({"draw", "relative_l2_error", "misfit"});
    for (int d = 0; d < ctx.cfg.noise_draws; ++d) {
      DnMatrix m = clean;
      for (Eigen::Index k = 0; k < m.matrix.size(); ++k) m.matrix.data()[k] *= 1.0 + ctx.cfg.noise * normal(rng);
      const auto r = recover_potential(ctx.op, m, ctx.cfg.regularization, opts);
      noisy.add_row({static_cast<double>(d), relative_l2(r.a, truth), r.misfit});
    }
    ctx.write_csv("noise.csv", noisy);
  }
  ctx.manifest_extra["relative_l2_error"] = relative_l2(res.a, truth);
  ctx.manifest_extra["misfit"] = res.misfit;
  ctx.manifest_extra["status"] = std::string(to_string(res.status));
  ctx.manifest_extra["method"] =
      "projected Levenberg-Marquardt with Tikhonov term; synthetic data from the same discretization";
}

void run_probe(Context& ctx) {
  const Grid& grid = *ctx.grid;
  const Window full = window_by_distance(ctx.grid, ctx.cfg.window_min, ctx.cfg.window_max, ctx.cfg.window_side);
  auto idx = full.indices();
  const Point c = grid.domain().center();
  auto dist = [&](std::size_t i) { return std::hypot(grid.node(i)[0] - c[0], grid.node(i)[1] - c[1]); };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
  io::CsvTable t({"window_size", "sigma_min"});
  for (int k = 0; k < ctx.cfg.probe_windows; ++k) {
    const std::size_t drop = static_cast<std::size_t>(k) * static_cast<std::size_t>(ctx.cfg.probe_step);
    if (drop >= idx.size()) break;
    const Window w(ctx.grid, std::vector<std::size_t>(idx.begin(), idx.end() - static_cast<long>(drop)));
    t.add_row({static_cast<double>(w.size()), strong_uniqueness_probe(ctx.op, w)});
  }
  ctx.write_csv("probe.csv", t);
  ctx.manifest_extra["node_count"] = grid.size();
}

void write_error(const std::filesystem::path& out, const std::string& experiment, const std::string& code,
                 const std::string& message) {
  json e = {{"experiment", experiment}, {"error", code}, {"message", message}};
  std::filesystem::create_directories(out);
  io::write_text(out / "errors.json", e.dump(2) + "\n");
}

}  // namespace

int run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end()) {
      invalid("no experiment selected");
    }
    std::filesystem::create_directories(out_dir);
    Context ctx{cfg, out_dir, build_grid(cfg.domain, cfg.h, cfg.R), {}, json::object(), {}};
    ctx.op = assemble(ctx.grid, cfg.s);
    if (cfg.experiment == "solve") run_solve(ctx);
    else if (cfg.experiment == "forward") run_forward(ctx);
    else if (cfg.experiment == "principles") run_principles(ctx);
    else if (cfg.experiment == "linearize") run_linearize(ctx);
    else if (cfg.experiment == "recover") run_recover(ctx);
    else run_probe(ctx);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m;
    m["experiment"] = cfg.experiment;
    m["config"] = json::parse(cfg.resolved);
    m["version"] = kVersion;
    m["wall_clock_seconds"] = secs;
    m["grid"] = {{"nodes", ctx.grid->size()},
                 {"interior", ctx.grid->interior_count()},
                 {"exterior", ctx.grid->exterior_count()}};
    m["outputs"] = ctx.outputs;
    m["results"] = ctx.manifest_extra;
    m["status"] = "ok";
    io::write_text(out_dir / "manifest.json", m.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    write_error(out_dir, cfg.experiment, std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    write_error(out_dir, cfg.experiment, "Internal", e.what());
  }
  return 1;
}

int run_file(const std::string& subcommand, const std::filesystem::path& config,
             const std::filesystem::path& out_dir) {
  try {
    std::ifstream in(config);
    if (!in) throw Error(ErrorCode::ConfigParse, "cannot read config " + config.string());
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    if (!cfg.experiment.empty() && cfg.experiment != subcommand) {
      invalid("config names experiment '" + cfg.experiment + "' but subcommand is '" + subcommand + "'");
    }
    cfg.experiment = subcommand;
    json r = json::parse(cfg.resolved);
    r["experiment"] = subcommand;
    cfg.resolved = r.dump();
    return run(cfg, out_dir);
  } catch (const Error& e) {
    write_error(out_dir, subcommand, std::string(to_string(e.code())), e.what());
  }
  return 1;
}

}  // namespace fracsem::cli
