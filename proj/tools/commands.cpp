#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "semicl/diag.hpp"
#include "semicl/hj1d.hpp"
#include "semicl/hjnd.hpp"
#include "semicl/lattice_field.hpp"
#include "semicl/potentials.hpp"
#include "semicl/resummation.hpp"
#include "semicl/rspt.hpp"
#include "semicl/series.hpp"
#include "semicl/transport1d.hpp"

namespace semicl::cli {

namespace fs = std::filesystem;

void emit(const RunContext& ctx, const std::string& name, const std::string& body) {
  fs::create_directories(ctx.out);
  std::ofstream os(ctx.out / name, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + (ctx.out / name).string());
  os << "# config_hash=" << ctx.hash << " command=" << ctx.command << " seed=" << ctx.seed << "\n" << body;
}

void parallel_for(unsigned threads, std::size_t count, const std::function<void(std::size_t)>& task) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto loop = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers <= 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string g17(double v) { return fmt::format("{:.17g}", v); }

struct ParsedPotential {
  double mass = 1.0;
  std::vector<double> omega;
  std::vector<Monomial> terms;
  std::vector<double> lambda;

  int dimension() const { return static_cast<int>(omega.size()); }

  Potential1D one_d() const {
    if (omega.size() != 1) throw ValidationError("potential: this command needs a one-dimensional potential");
    std::map<int, double> an;
    for (const auto& t : terms) an[t.exponents.at(0)] += t.coeff;
    return Potential1D(mass, omega[0], an, lambda.empty() ? 0.0 : lambda[0]);
  }
  PotentialND n_d() const { return PotentialND(mass, omega, terms, lambda); }
};

std::vector<double> number_or_list(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ValidationError(what + ": expected a number or a list");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(what + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ParsedPotential parse_potential(Section s) {
  ParsedPotential p;
  p.mass = s.positive("mass", 1.0);
  p.omega = number_or_list(s.require<json>("omega"), s.path() + ".omega");
  if (p.omega.empty()) throw ValidationError(s.path() + ".omega: empty");
  if (s.has("terms")) {
    const json& terms = s.raw("terms");
    if (!terms.is_array()) throw ValidationError(s.path() + ".terms: expected a list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Section t(terms[i], fmt::format("{}.terms[{}]", s.path(), i));
      Monomial m;
      m.exponents = t.require<std::vector<int>>("exponents");
      m.coeff = t.require<double>("coeff");
      t.finish();
      if (m.exponents.size() != p.omega.size())
        throw ValidationError(fmt::format("{}.terms[{}]: exponent list must have {} entries", s.path(), i, p.omega.size()));
      p.terms.push_back(m);
    }
  }
  if (s.has("lambda")) p.lambda = number_or_list(s.raw("lambda"), s.path() + ".lambda");
  s.finish();
  return p;
}

Grid1D parse_grid(Section g) {
  const double half_width = g.positive("half_width", 4.0);
  const auto points = g.get<std::size_t>("points", 400);
  const double stretch = g.positive("stretch", 1.0);
  g.finish();
  if (points < 8) throw ValidationError(g.path() + ".points: need at least 8");
  return stretch == 1.0 ? Grid1D::uniform(half_width, points) : Grid1D::stretched(half_width, points, stretch);
}

void require_valid(const RunContext& ctx, const ValidationReport& r) {
  if (ctx.force || r.passed()) return;
  throw ValidationError("potential fails validation (use --force to skip):\n" + r.summary());
}

std::string summary_table(const std::vector<std::pair<std::string, double>>& rows) {
  std::string s = "quantity,value\n";
  for (const auto& [k, v] : rows) s += k + "," + g17(v) + "\n";
  return s;
}

template <class W, class... Args>
std::string to_string(W writer, const Args&... args) {
  std::ostringstream os;
  writer(os, args...);
  return os.str();
}

// ---------------------------------------------------------------- oscillator

void oscillator_nd(const RunContext& ctx, Section& cfg, const ParsedPotential& pp) {
  const PotentialND v = pp.n_d();
  const double box = std::max(1.0, cfg.get<double>("validation_half_width", 3.0));
  require_valid(ctx, validate(v, SamplingBox::symmetric(v.dimension(), box, 21)));
  std::vector<std::vector<double>> points = cfg.require<std::vector<std::vector<double>>>("points");
  const bool dump = cfg.get<bool>("dump_trajectories", false);
  TimeGrid grid = TimeGrid::for_potential(v);
  if (cfg.has("time_grid")) {
    Section tg = cfg.child("time_grid");
    double wmin = v.omega()[0];
    for (double w : v.omega()) wmin = std::min(wmin, w);
    const double horizon = tg.get<double>("horizon", 24.0 / wmin);
    const double h_min = tg.positive("h_min", 1e-5);
    const double ratio = tg.positive("ratio", 1.0001);
    const double h_max = tg.positive("h_max", 5e-3);
    tg.finish();
    grid = TimeGrid::geometric(horizon, h_min, ratio, h_max);
  }
  MinimizeOptions mo;
  mo.decay_tol = cfg.positive("decay_tol", mo.decay_tol);
  mo.newton = cfg.get<bool>("newton", true);
  cfg.finish();
  for (const auto& x : points)
    if (static_cast<int>(x.size()) != v.dimension()) throw ValidationError("points: wrong dimension");

  std::vector<std::string> rows(points.size());
  const auto nu = v.nu();
  parallel_for(ctx.threads, points.size(), [&](std::size_t i) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(points[i].data(), static_cast<Eigen::Index>(points[i].size()));
    const Trajectory tr = minimize_action(v, x, grid, mo);
    const S0Gradient sg = s0_and_gradient(v, tr);
    const HessianTransport ht = hessian_transport(v, tr);
    const double s1 = s1_along_flow(v, ht);
    double emax = 0.0;
    for (double e : inverted_energy(v, tr)) emax = std::max(emax, std::abs(e));
    double lower = 0.0;
    for (int d = 0; d < v.dimension(); ++d) lower += 0.5 * v.mass() * nu[static_cast<std::size_t>(d)] * x[d] * x[d];
    std::string row;
    for (double c : points[i]) row += g17(c) + ",";
    row += g17(sg.s0);
    for (Eigen::Index d = 0; d < sg.gradient.size(); ++d) row += "," + g17(sg.gradient[d]);
    row += "," + g17(s1) + "," + g17(sg.hj_residual) + "," + g17(emax) + "," + g17(euler_lagrange_residual(v, tr)) + "," +
           g17(lower) + "," + std::to_string(tr.iterations) + "\n";
    rows[i] = row;
    if (dump) {
      emit(ctx, fmt::format("trajectory_{}.csv", i), to_string([&](std::ostream& os) { write_trajectory_csv(os, v, tr); }));
      emit(ctx, fmt::format("hessian_{}.csv", i), to_string([&](std::ostream& os) { write_hessian_csv(os, ht); }));
    }
  });
  std::string head;
  for (int d = 0; d < v.dimension(); ++d) head += fmt::format("x{},", d + 1);
  head += "S0";
  for (int d = 0; d < v.dimension(); ++d) head += fmt::format(",dS0_{}", d + 1);
  head += ",S1,hj_residual,energy_max,el_residual,lower_bound,iterations\n";
  for (const auto& r : rows) head += r;
  emit(ctx, "summary.csv", head);
}

void oscillator(const RunContext& ctx) {
  Section cfg(ctx.config, "config");
  if (cfg.has("potential") && cfg.has("superpotential"))
    throw ValidationError("config: give either potential or superpotential");
  std::optional<ParsedPotential> pp;
  if (cfg.has("potential")) {
    pp = parse_potential(cfg.child("potential"));
    if (pp->dimension() > 1) return oscillator_nd(ctx, cfg, *pp);
  }
  const std::size_t K = cfg.get<std::size_t>("order", 8);
  if (K < 1) throw ValidationError("config.order: must be >= 1");
  const Grid1D grid = parse_grid(cfg.has("grid") ? cfg.child("grid") : Section(json::object(), "config.grid"));
  FundamentalSolutionOptions fo;
  fo.switch_radius = cfg.get<double>("switch_radius", 0.0);
  fo.origin_degree = cfg.get<std::size_t>("origin_degree", fo.origin_degree);
  HierarchyOptions ho;
  ho.regularity_tol = cfg.positive("regularity_tol", ho.regularity_tol);
  const double hbar = cfg.positive("hbar", 1.0);

  std::shared_ptr<HierarchyState> state;
  std::shared_ptr<const FundamentalSolution1D> sol;
  if (pp) {
    const Potential1D v = pp->one_d();
    const double half = grid.nodes().back();
    require_valid(ctx, validate(v, SamplingBox::symmetric(1, half, 201)));
    sol = std::make_shared<FundamentalSolution1D>(v, grid, fo);
    state = std::make_shared<HierarchyState>(sol, K, Polynomial{}, ho);
  } else {
    Section w = cfg.child("superpotential");
    const auto coeffs = w.require<std::vector<double>>("coefficients");
    const std::string sector = w.get<std::string>("sector", "plus");
    w.finish();
    if (sector != "plus" && sector != "minus") throw ValidationError("superpotential.sector: plus or minus");
    const Superpotential sw{Polynomial(coeffs)};
    require_valid(ctx, validate(sw.bosonic_potential(), SamplingBox::symmetric(1, grid.nodes().back(), 201)));
    state = std::make_shared<HierarchyState>(
        susy_ground(sw, sector == "plus" ? Superpotential::Sector::plus : Superpotential::Sector::minus, K, grid, ho));
    sol = state->solution_ptr();
  }

  std::vector<int> levels;
  std::size_t excited_order = 4;
  if (cfg.has("excited")) {
    Section ex = cfg.child("excited");
    levels = ex.require<std::vector<int>>("levels");
    excited_order = ex.get<std::size_t>("order", excited_order);
    ex.finish();
  }
  cfg.finish();

  const SternbergMap1D map(*sol);
  emit(ctx, "fundamental.csv", to_string([&](std::ostream& os) { write_csv(os, *sol, map); }));
  emit(ctx, "profiles.csv", to_string([&](std::ostream& os) { write_profiles_csv(os, *state); }));
  emit(ctx, "coefficients.csv", to_string([&](std::ostream& os) { write_coefficients_csv(os, *state); }));
  emit(ctx, "series.txt", to_string([&](std::ostream& os) { write_series(os, state->energy_series()); }));

  std::vector<std::pair<std::string, double>> summary;
  for (std::size_t k = 0; k < state->energy().size(); ++k) summary.emplace_back(fmt::format("e_{}", k), state->energy()[k]);
  summary.emplace_back("regularity_defect", state->regularity_defect());
  summary.emplace_back("hj_residual", sol->hj_residual());
  summary.emplace_back("energy_sum", assemble(*state, hbar).energy);

  std::vector<std::unique_ptr<ExcitedState>> excited(levels.size());
  parallel_for(ctx.threads, levels.size(), [&](std::size_t i) {
    if (levels[i] < 1) throw ValidationError("excited.levels: quantum numbers must be >= 1");
    excited[i] = std::make_unique<ExcitedState>(*state, levels[i], excited_order, ho);
  });
  for (std::size_t i = 0; i < levels.size(); ++i) {
    emit(ctx, fmt::format("excited_{}.csv", levels[i]),
         to_string([&](std::ostream& os) { write_coefficients_csv(os, *state, excited[i].get()); }));
    summary.emplace_back(fmt::format("excited_{}_energy_sum", levels[i]), assemble(*state, hbar, std::nullopt, excited[i].get()).energy);
    summary.emplace_back(fmt::format("excited_{}_regularity_defect", levels[i]), excited[i]->regularity_defect());
  }
  emit(ctx, "summary.csv", summary_table(summary));
}

// ---------------------------------------------------------------- compare

DiagMethod parse_method(const std::string& m) {
  if (m == "fd" || m == "finite_difference") return DiagMethod::finite_difference;
  if (m == "basis" || m == "harmonic_basis") return DiagMethod::harmonic_basis;
  throw ValidationError("diag.method: fd or basis");
}

void compare(const RunContext& ctx) {
  Section cfg(ctx.config, "config");
  const Potential1D v = parse_potential(cfg.child("potential")).one_d();
  const std::size_t K = cfg.get<std::size_t>("order", 5);
  if (K < 1) throw ValidationError("config.order: must be >= 1");
  const Grid1D grid = parse_grid(cfg.has("grid") ? cfg.child("grid") : Section(json::object(), "config.grid"));
  const std::string arithmetic = cfg.get<std::string>("arithmetic", "exact");
  if (arithmetic != "exact" && arithmetic != "floating") throw ValidationError("config.arithmetic: exact or floating");
  const double hbar = cfg.positive("hbar", 1.0);
  require_valid(ctx, validate(v, SamplingBox::symmetric(1, grid.nodes().back(), 201)));

  std::optional<Section> diag;
  if (cfg.has("diag")) diag.emplace(cfg.child("diag"));
  auto sol = std::make_shared<FundamentalSolution1D>(v, grid);
  const HierarchyState state(sol, K);
  const PowerSeries rs =
      rs_series(v, 0, K - 1, arithmetic == "exact" ? Arithmetic::exact : Arithmetic::floating);

  std::string table = "k,hierarchy,rspt,abs_diff,rel_diff\n";
  for (std::size_t k = 0; k < K && k < rs.coeffs.size(); ++k) {
    const double h = state.energy()[k], r = rs.coeffs[k];
    const double d = std::abs(h - r);
    table += fmt::format("{},{},{},{},{}\n", k, g17(h), g17(r), g17(d), g17(d / std::max(std::abs(r), 1e-300)));
  }
  emit(ctx, "compare.csv", table);
  emit(ctx, "rspt_series.txt", to_string([&](std::ostream& os) { write_series(os, rs); }));

  if (diag) {
    const DiagMethod method = parse_method(diag->get<std::string>("method", "fd"));
    const auto size = diag->get<std::size_t>("size", method == DiagMethod::finite_difference ? 4000 : 200);
    const auto levels = diag->get<std::size_t>("levels", 4);
    SpectralOptions so;
    so.half_width = diag->get<double>("half_width", 0.0);
    std::vector<double> tail;
    if (diag->has("tail")) tail = diag->require<std::vector<double>>("tail");
    diag->finish();
    if (!tail.empty() && tail.size() != 2) throw ValidationError("diag.tail: expected [lo, hi]");
    const SpectralResult r = solve_spectrum(v, hbar, method, size, levels, so);
    emit(ctx, "eigenvalues.csv", to_string([&](std::ostream& os) { write_eigenvalues_csv(os, r); }));
    if (tail.size() == 2) {
      emit(ctx, "tail.csv", to_string([&](std::ostream& os) { write_tail_csv(os, tail_exponent(r, *sol, hbar, tail[0], tail[1])); }));
      emit(ctx, "tail_gaussian.csv", to_string([&](std::ostream& os) { write_tail_csv(os, gaussian_tail(*sol, tail[0], tail[1])); }));
    }
  }
  cfg.finish();
}

// ---------------------------------------------------------------- resum

void resum(const RunContext& ctx) {
  Section cfg(ctx.config, "config");
  PowerSeries series;
  if (cfg.has("series") == cfg.has("rspt")) throw ValidationError("config: give exactly one of series or rspt");
  if (cfg.has("series")) {
    fs::path p = cfg.require<std::string>("series");
    if (p.is_relative()) p = ctx.config_dir / p;
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot open series file " + p.string());
    series = read_series(in);
  } else {
    Section r = cfg.child("rspt");
    const int power = r.require<int>("power");
    const int state = r.get<int>("state", 0);
    const auto order = r.get<std::size_t>("order", 9);
    const std::string arithmetic = r.get<std::string>("arithmetic", "exact");
    r.finish();
    series = rs_coupling_series(power, state, order, arithmetic == "floating" ? Arithmetic::floating : Arithmetic::exact);
    emit(ctx, "series.txt", to_string([&](std::ostream& os) { write_series(os, series); }));
  }
  const auto points = cfg.require<std::vector<double>>("points");
  const auto approximants = cfg.require<std::vector<std::vector<int>>>("approximants");
  const auto methods = cfg.get<std::vector<std::string>>("methods", {"pade", "borel"});
  ResummationOptions ro;
  ro.pole_angle_deg = cfg.positive("pole_angle_deg", ro.pole_angle_deg);
  ro.quad_tol = cfg.positive("quad_tol", ro.quad_tol);
  cfg.finish();

  std::vector<ResummationReport> reports;
  for (const auto& lm : approximants) {
    if (lm.size() != 2 || lm[0] < 0 || lm[1] < 0) throw ValidationError("approximants: entries are [L, M]");
    for (double z : points)
      for (const auto& m : methods) {
        if (m == "pade") reports.push_back(pade_sum(series, lm[0], lm[1], z));
        else if (m == "borel") reports.push_back(borel_pade(series, lm[0], lm[1], z, ro));
        else throw ValidationError("methods: pade or borel");
      }
  }
  for (const auto& r : reports)
    if (!r.note.empty()) std::cerr << fmt::format("{} [{}/{}] at {}: {}\n", r.method, r.l, r.m, r.point, r.note);
  emit(ctx, "report.csv", to_string([&](std::ostream& os) { write_report_csv(os, reports); }));
}

// ---------------------------------------------------------------- validate

void validate_command(const RunContext& ctx) {
  Section cfg(ctx.config, "config");
  const ParsedPotential pp = parse_potential(cfg.child("potential"));
  const double half = cfg.positive("half_width", 3.0);
  const int resolution = cfg.get<int>("resolution", pp.dimension() == 1 ? 201 : 21);
  cfg.finish();
  if (resolution < 3) throw ValidationError("config.resolution: need at least 3");
  const SamplingBox box = SamplingBox::symmetric(pp.dimension(), half, resolution);
  const ValidationReport r = pp.dimension() == 1 ? validate(pp.one_d(), box) : validate(pp.n_d(), box);
  std::string table = "check,passed,worst_value,worst_point,detail\n";
  for (const auto& c : r.checks) {
    std::string pt;
    for (std::size_t i = 0; i < c.worst_point.size(); ++i) pt += (i ? " " : "") + g17(c.worst_point[i]);
    table += fmt::format("{},{},{},{},\"{}\"\n", c.name, c.passed ? 1 : 0, g17(c.worst_value), pt, c.detail);
  }
  emit(ctx, "validation.csv", table);
  if (!r.passed()) throw ValidationError("potential fails validation:\n" + r.summary());
}

// ---------------------------------------------------------------- field

LatticeProblem parse_lattice(const RunContext& ctx, Section s) {
  LatticeProblem p;
  p.n = s.get<int>("n", 1);
  p.N = s.get<std::size_t>("N", p.N);
  p.a = s.positive("a", p.a);
  p.dt = s.positive("dt", p.dt);
  p.stretch = s.positive("stretch", 1.0);
  p.dt_max = s.get<double>("dt_max", 0.0);
  p.horizon = s.get<double>("horizon", 0.0);
  if (s.has("M")) {
    // a fixed number of uniform steps overrides the horizon
    const auto M = s.require<std::size_t>("M");
    if (p.stretch != 1.0) throw ValidationError("lattice.M: only with stretch = 1");
    p.horizon = static_cast<double>(M) * p.dt;
  }
  p.decay_tol = s.positive("decay_tol", p.decay_tol);
  p.poly = Polynomial(s.require<std::vector<double>>("poly"));
  Section b = s.child("boundary");
  if (b.has("modes") == b.has("file")) throw ValidationError("lattice.boundary: give exactly one of modes or file");
  if (b.has("modes")) {
    const json& modes = b.raw("modes");
    if (!modes.is_array()) throw ValidationError("lattice.boundary.modes: expected a list");
    std::vector<BoundaryMode> list;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      Section m(modes[i], fmt::format("lattice.boundary.modes[{}]", i));
      BoundaryMode bm;
      bm.wave = m.require<std::vector<int>>("wave");
      bm.amp = m.require<double>("amp");
      bm.phase = m.get<double>("phase", 0.0);
      m.finish();
      list.push_back(bm);
    }
    b.finish();
    s.finish();
    p.phi = p.modes_to_sites(list);
  } else {
    fs::path path = b.require<std::string>("file");
    b.finish();
    s.finish();
    if (path.is_relative()) path = ctx.config_dir / path;
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open boundary file " + path.string());
    double v;
    while (in >> v) p.phi.push_back(v);
    if (!in.eof()) throw ValidationError("boundary file " + path.string() + ": non-numeric entry");
  }
  p.validate();
  return p;
}

void field(const RunContext& ctx) {
  Section cfg(ctx.config, "config");
  const LatticeProblem p = parse_lattice(ctx, cfg.child("lattice"));
  FieldOptions fo;
  if (cfg.has("solver")) {
    Section s = cfg.child("solver");
    fo.max_newton = s.get<std::size_t>("max_newton", fo.max_newton);
    fo.max_cg = s.get<std::size_t>("max_cg", fo.max_cg);
    fo.cg_tol = s.positive("cg_tol", fo.cg_tol);
    fo.grad_tol = s.positive("grad_tol", fo.grad_tol);
    s.finish();
  }
  const std::string rule_name = cfg.get<std::string>("gradient_rule", "discrete_momentum");
  if (rule_name != "discrete_momentum" && rule_name != "three_point")
    throw ValidationError("config.gradient_rule: discrete_momentum or three_point");
  const GradientRule rule = rule_name == "three_point" ? GradientRule::three_point : GradientRule::discrete_momentum;
  const auto amplitudes = cfg.get<std::vector<double>>("amplitudes", {});
  const auto probes = cfg.get<std::size_t>("fd_probes", 0);
  const double fd_step = cfg.positive("fd_step", 1e-4);
  const auto trials = cfg.get<std::size_t>("uniqueness_trials", 0);
  const bool snapshot = cfg.get<bool>("snapshot", false);
  cfg.finish();

  const FieldMinimizer f = minimize_field(p, fo);
  const auto g = functional_gradient(p, f, rule);
  const EnergyProfile e = energy_profile(p, f);
  const double free = free_action(p, p.mass());
  double flux = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) flux += p.phi[x] * g[x];
  flux *= p.volume_element();
  const double T = -f.t.front();
  bool nonnegative = true;
  for (double c : p.poly.coefficients()) nonnegative = nonnegative && c >= 0.0;

  std::vector<std::pair<std::string, double>> summary{
      {"S0", f.action},
      {"S0_free", free},
      {"rel_diff", f.action == 0.0 ? 0.0 : (f.action - free) / f.action},
      {"hj_residual", hj_residual(p, g)},
      {"energy_max", e.max_abs},
      {"energy_ratio", f.action == 0.0 ? 0.0 : e.max_abs / (f.action / T)},
      {"R", f.action == 0.0 ? 0.0 : flux / f.action},
      {"T", f.action == 0.0 ? 0.0 : virial_t(p, p.phi)},
      {"horizon", T},
      {"slices", static_cast<double>(f.slices())},
      {"newton_iterations", static_cast<double>(f.newton_iterations)},
      {"cg_iterations", static_cast<double>(f.cg_iterations)},
      {"gradient_norm", f.gradient_norm}};
  if (nonnegative) summary.emplace_back("gaussian_slack", gaussian_bound(p, f).slack);
  emit(ctx, "summary.csv", summary_table(summary));
  emit(ctx, "energy.csv", to_string([&](std::ostream& os) { write_energy_csv(os, e); }));
  {
    std::string s = "site,phi,gradient\n";
    for (std::size_t x = 0; x < g.size(); ++x) s += fmt::format("{},{},{}\n", x, g17(p.phi[x]), g17(g[x]));
    emit(ctx, "gradient.csv", s);
  }
  if (snapshot) {
    fs::create_directories(ctx.out);
    std::ofstream os(ctx.out / "snapshot.bin", std::ios::binary);
    write_snapshot(os, p, f);
  }

  std::mt19937_64 rng(ctx.seed);
  if (probes > 0) {
    std::vector<std::size_t> sites(p.sites());
    for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = i;
    std::shuffle(sites.begin(), sites.end(), rng);
    sites.resize(std::min(probes, sites.size()));
    std::sort(sites.begin(), sites.end());
    std::vector<double> fd(sites.size());
    parallel_for(ctx.threads, sites.size(), [&](std::size_t i) {
      LatticeProblem up = p, dn = p;
      up.phi[sites[i]] += fd_step;
      dn.phi[sites[i]] -= fd_step;
      const double sp = minimize_field(up, fo, &f.field).action;
      const double sm = minimize_field(dn, fo, &f.field).action;
      fd[i] = (sp - sm) / (2.0 * fd_step * p.volume_element());
    });
    std::string s = "site,gradient,fd,rel_diff\n";
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const double gi = g[sites[i]];
      s += fmt::format("{},{},{},{}\n", sites[i], g17(gi), g17(fd[i]), g17(std::abs(gi - fd[i]) / std::max(std::abs(fd[i]), 1e-300)));
    }
    emit(ctx, "fd_gradient.csv", s);
  }
  if (trials > 0) {
    std::vector<std::vector<double>> starts(trials);
    std::normal_distribution<double> normal(0.0, 1.0);
    double amp = 0.0;
    for (double v : p.phi) amp = std::max(amp, std::abs(v));
    for (auto& s : starts) {
      s.resize(f.field.size());
      for (double& v : s) v = amp * normal(rng);
    }
    std::vector<double> actions(trials);
    parallel_for(ctx.threads, trials, [&](std::size_t i) { actions[i] = minimize_field(p, fo, &starts[i]).action; });
    std::string s = "trial,action,rel_diff\n";
    for (std::size_t i = 0; i < trials; ++i)
      s += fmt::format("{},{},{}\n", i, g17(actions[i]), g17(std::abs(actions[i] - f.action) / std::max(std::abs(f.action), 1e-300)));
    emit(ctx, "uniqueness.csv", s);
  }
  if (!amplitudes.empty()) {
    const auto pts = virial_ratio(p, amplitudes, fo);
    for (const auto& v : pts)
      if (v.step_halving)
        std::cerr << fmt::format("warning: line search shortened Newton steps at amplitude {}\n", v.amplitude);
    emit(ctx, "virial.csv", to_string([&](std::ostream& os) { write_virial_csv(os, pts); }));
  }
}

}  // namespace

void run_command(const RunContext& ctx) {
  if (ctx.command == "oscillator") return oscillator(ctx);
  if (ctx.command == "compare") return compare(ctx);
  if (ctx.command == "resum") return resum(ctx);
  if (ctx.command == "validate") return validate_command(ctx);
  if (ctx.command == "field") return field(ctx);
  throw ValidationError("unknown command " + ctx.command);
}

}  // namespace semicl::cli
