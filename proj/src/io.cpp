#include "varoc/io.hpp"

#include <chrono>
#include <numbers>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "varoc/kepler.hpp"

namespace varoc::io {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

[[noreturn]] void bad_config(const std::string& msg) { throw ConfigError(msg); }

double require_number(const json& j, const std::string& ctx, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    bad_config(ctx + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double number_in_unit_interval(const json& j, const std::string& ctx,
                               const std::string& key) {
  double v = require_number(j, ctx, key);
  if (v < 0.0 || v > 1.0)
    bad_config(ctx + "." + key + " = " + std::to_string(v) + " outside [0,1]");
  return v;
}

Vec parse_vec(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) bad_config(ctx + " must be a non-empty array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad_config(ctx + " must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Mat parse_mat(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) bad_config(ctx + " must be an array of rows");
  Mat m(j.size(), j[0].size());
  for (size_t r = 0; r < j.size(); ++r) {
    Vec row = parse_vec(j[r], ctx + " row");
    if (row.size() != m.cols()) bad_config(ctx + " rows must have equal length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

AffineSymmetry parse_symmetry(const json& j) {
  AffineSymmetry sym;
  sym.generator_linear = parse_mat(j.at("B"), "symmetry.B");
  if (j.contains("d"))
    sym.generator_translation = parse_vec(j.at("d"), "symmetry.d");
  else
    sym.generator_translation = Vec::Zero(sym.generator_linear.rows());
  if (sym.generator_linear.rows() != sym.generator_linear.cols() ||
      sym.generator_translation.size() != sym.generator_linear.rows())
    bad_config("symmetry generators have inconsistent shapes");
  std::string psi = j.value("psi", std::string("point-independent"));
  if (psi == "point-independent")
    sym.psi = AffineSymmetry::PsiDependence::PointIndependent;
  else if (psi == "beta-equals-gamma")
    sym.psi = AffineSymmetry::PsiDependence::BetaEqualsGamma;
  else
    bad_config("symmetry.psi must be 'point-independent' or 'beta-equals-gamma'");
  return sym;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (!j.contains("model") || !j.at("model").contains("id"))
      bad_config("config needs model.id");
    cfg.model_id = j.at("model").at("id").get<std::string>();
    cfg.model_params = j.at("model").value("params", json::object());

    std::string form = j.value("formulation", std::string("independent"));
    if (form == "independent")
      cfg.formulation = Formulation::Independent;
    else if (form == "dependent")
      cfg.formulation = Formulation::Dependent;
    else
      bad_config("formulation must be 'independent' or 'dependent'");

    if (j.contains("scheme")) {
      const json& s = j.at("scheme");
      cfg.alpha = number_in_unit_interval(s, "scheme", "alpha");
      cfg.beta = number_in_unit_interval(s, "scheme", "beta");
      cfg.gamma = number_in_unit_interval(s, "scheme", "gamma");
    }

    if (!j.contains("grid")) bad_config("config needs a grid block");
    const json& g = j.at("grid");
    cfg.horizon = require_number(g, "grid", "T");
    if (cfg.horizon <= 0.0) bad_config("grid.T must be positive");
    const bool has_n = g.contains("N"), has_h = g.contains("h");
    if (has_n == has_h) bad_config("grid needs exactly one of N or h");
    if (has_n) {
      if (!g.at("N").is_number_integer()) bad_config("grid.N must be an integer");
      cfg.num_steps = g.at("N").get<int>();
    } else {
      double h = require_number(g, "grid", "h");
      if (h <= 0.0) bad_config("grid.h must be positive");
      cfg.num_steps = static_cast<int>(std::llround(cfg.horizon / h));
      if (cfg.num_steps < 2 ||
          std::abs(cfg.num_steps * h - cfg.horizon) > 1e-12 * std::max(1.0, cfg.horizon))
        bad_config("grid.h must divide T into at least two uniform steps");
    }
    if (cfg.num_steps < 2) bad_config("grid.N must be at least 2");

    if (j.contains("solver")) {
      const json& s = j.at("solver");
      cfg.solver.tol = s.value("tol", cfg.solver.tol);
      cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
      cfg.solver.fd_step = s.value("fd_step", cfg.solver.fd_step);
      cfg.solver.verbose = s.value("verbose", cfg.solver.verbose);
      if (cfg.solver.tol <= 0.0 || cfg.solver.max_iter < 1 || cfg.solver.fd_step <= 0.0)
        bad_config("solver settings out of range");
    }

    std::string guess = j.value("guess", std::string("zero-costate"));
    if (guess == "zero-costate")
      cfg.guess = GuessStrategy::ZeroCostate;
    else if (guess == "linear-interp")
      cfg.guess = GuessStrategy::LinearInterp;
    else
      bad_config("guess must be 'zero-costate' or 'linear-interp'");

    if (j.contains("symmetry") && !j.at("symmetry").is_null())
      cfg.symmetry_override = parse_symmetry(j.at("symmetry"));

    if (!j.contains("output") || !j.at("output").contains("dir"))
      bad_config("config needs output.dir");
    cfg.output_dir = j.at("output").at("dir").get<std::string>();
    cfg.output_prefix = j.at("output").value("prefix", cfg.output_prefix);

    if (j.contains("study")) {
      const json& st = j.at("study");
      if (!st.contains("schemes") || !st.at("schemes").is_array() ||
          st.at("schemes").empty())
        bad_config("study.schemes must be a non-empty array");
      for (const json& s : st.at("schemes")) {
        StudyScheme sch;
        sch.id = s.value("id", std::string("scheme") +
                                   std::to_string(cfg.study_schemes.size()));
        sch.alpha = number_in_unit_interval(s, "study scheme", "alpha");
        sch.beta = number_in_unit_interval(s, "study scheme", "beta");
        sch.gamma = number_in_unit_interval(s, "study scheme", "gamma");
        std::string sform = s.value("formulation", std::string("independent"));
        if (sform == "independent")
          sch.form = Formulation::Independent;
        else if (sform == "dependent")
          sch.form = Formulation::Dependent;
        else
          bad_config("study scheme formulation invalid");
        cfg.study_schemes.push_back(sch);
      }
      if (!st.contains("N") || !st.at("N").is_array() || st.at("N").empty())
        bad_config("study.N must be a non-empty array of step counts");
      for (const json& v : st.at("N")) {
        if (!v.is_number_integer() || v.get<int>() < 2)
          bad_config("study.N entries must be integers >= 2");
        cfg.study_steps.push_back(v.get<int>());
      }
      int max_n = *std::max_element(cfg.study_steps.begin(), cfg.study_steps.end());
      cfg.reference_steps = st.value("reference_N", 10 * max_n);
      if (cfg.reference_steps < 10 * max_n)
        bad_config("study.reference_N must be at least ten times the largest N");
      for (int n : cfg.study_steps)
        if (cfg.reference_steps % n != 0)
          bad_config("study.reference_N must be divisible by every study N");
    }

    if (j.contains("check")) {
      cfg.check_probes = j.at("check").value("probes", cfg.check_probes);
      cfg.check_seed = j.at("check").value("seed", cfg.check_seed);
      if (cfg.check_probes < 1) bad_config("check.probes must be positive");
    }
  } catch (const json::exception& e) {
    bad_config(std::string("config schema violation: ") + e.what());
  }
  return cfg;
}

namespace {

ModelSetup build_kepler(const json& params) {
  KeplerParams kp = KeplerParams::defaults();
  kp.grav = params.value("G", kp.grav);
  kp.mass = params.value("M", kp.mass);
  kp.d_revs = params.value("d_revs", kp.d_revs);
  kp.r_inner = params.value("r0", kp.r_inner);
  kp.r_outer = params.value("rT", kp.r_outer);
  kp.x0 = params.value("x0", kp.r_inner);
  if (kp.grav <= 0 || kp.mass <= 0 || kp.r_inner <= 0 || kp.r_outer <= 0 || kp.x0 <= 0)
    bad_config("kepler parameters must be positive");
  kp.q_target = params.contains("qT") ? parse_vec(params.at("qT"), "model.params.qT")
                                      : Vec(Eigen::Vector2d(-kp.r_outer, 0.0));
  kp.v_target =
      params.contains("vT")
          ? parse_vec(params.at("vT"), "model.params.vT")
          : Vec(Eigen::Vector2d(0.0, -std::sqrt(kp.grav * kp.mass / kp.r_outer)));
  if (params.contains("Kq")) kp.weight_q = parse_mat(params.at("Kq"), "model.params.Kq");
  if (params.contains("Kv")) kp.weight_v = parse_mat(params.at("Kv"), "model.params.Kv");
  if (kp.q_target.size() != 2 || kp.v_target.size() != 2 || kp.weight_q.rows() != 2 ||
      kp.weight_v.rows() != 2)
    bad_config("kepler targets and weights must be planar");

  ModelSetup setup;
  // The horizon comes from the grid block; the formula value is reported in
  // the summary for reference.
  setup.problem = make_kepler_problem(kp, 1.0);
  setup.guess_target = kp.q_target;
  // Polar interpolation from the initial to the target orbit; the straight
  // chord would pass through the r = 0 singularity.
  const double r_from = kp.x0, r_to = kp.r_outer, revs = kp.d_revs;
  setup.guess_path = [r_from, r_to, revs](double s) {
    const double r = r_from + s * (r_to - r_from);
    const double theta = 2.0 * std::numbers::pi * revs * s;
    Vec q(2);
    q << r * std::cos(theta), r * std::sin(theta);
    return q;
  };
  setup.symmetry = AffineSymmetry::rotation_2d();
  setup.summary_extras["transfer_horizon_formula"] =
      transfer_horizon(kp.d_revs, kp.grav, kp.mass, kp.r_inner, kp.r_outer);
  // Probes stay inside an annulus well away from the r = 0 singularity.
  setup.probe_sampler = [](int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> radius(2.0, 6.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    std::vector<std::pair<Vec, Vec>> probes;
    probes.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double r = radius(rng), th = angle(rng);
      Vec q(2), v(2);
      q << r * std::cos(th), r * std::sin(th);
      v << vel(rng), vel(rng);
      probes.emplace_back(q, v);
    }
    return probes;
  };
  return setup;
}

}  // namespace

ModelSetup build_model(const RunConfig& cfg) {
  if (cfg.model_id == "kepler") return build_kepler(cfg.model_params);
  bad_config("unknown model id: " + cfg.model_id);
}

namespace {

struct CsvFile {
  std::ofstream out;
  fs::path path;
  explicit CsvFile(const fs::path& p) : out(p, std::ios::trunc), path(p) {
    if (!out) throw IoError("cannot open for writing: " + p.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
  void close() {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
    out.close();
  }
};

void write_trajectory_csv(const fs::path& path, const OCProblem& prob,
                          const SchemeParams& p, const DiscreteTrajectory& traj,
                          const DiagnosticsSeries& diag) {
  const int n = prob.system.n;
  const int m = prob.system.m;
  CsvFile csv(path);
  std::vector<std::string> header = {"k", "t"};
  for (int i = 0; i < n; ++i) header.push_back("q" + std::to_string(i));
  for (int i = 0; i < n; ++i) header.push_back("lam" + std::to_string(i));
  for (int i = 0; i < m; ++i) header.push_back("u" + std::to_string(i));
  for (int i = 0; i < n; ++i) header.push_back("v" + std::to_string(i));
  header.push_back("noether");
  header.push_back("h_new");
  csv.row(header);
  for (int k = 0; k <= p.num_steps; ++k) {
    std::vector<std::string> cells = {std::to_string(k), fmt(k * p.dt)};
    for (int i = 0; i < n; ++i) cells.push_back(fmt(traj.q[k](i)));
    for (int i = 0; i < n; ++i) cells.push_back(fmt(traj.lam[k](i)));
    Vec u = minimising_control(prob.system, traj.q[k], traj.lam[k]);
    for (int i = 0; i < m; ++i) cells.push_back(fmt(u(i)));
    for (int i = 0; i < n; ++i) cells.push_back(fmt(diag.momenta.p_lam[k](i)));
    cells.push_back(fmt(diag.noether[k]));
    cells.push_back(fmt(diag.hamiltonian_new[k]));
    csv.row(cells);
  }
  csv.close();
}

void write_controls_csv(const fs::path& path, const SchemeParams& p,
                        const DiscreteTrajectory& traj) {
  const int m = static_cast<int>(traj.u1[0].size());
  CsvFile csv(path);
  std::vector<std::string> header = {"k", "t_u1", "t_u2"};
  for (int i = 0; i < m; ++i) header.push_back("u1_" + std::to_string(i));
  for (int i = 0; i < m; ++i) header.push_back("u2_" + std::to_string(i));
  csv.row(header);
  for (int k = 0; k < p.num_steps; ++k) {
    const double tk = k * p.dt, tk1 = (k + 1) * p.dt;
    std::vector<std::string> cells = {std::to_string(k),
                                      fmt(p.beta * tk + (1.0 - p.beta) * tk1),
                                      fmt((1.0 - p.beta) * tk + p.beta * tk1)};
    for (int i = 0; i < m; ++i) cells.push_back(fmt(traj.u1[k](i)));
    for (int i = 0; i < m; ++i) cells.push_back(fmt(traj.u2[k](i)));
    csv.row(cells);
  }
  csv.close();
}

void write_diagnostics_csv(const fs::path& path, const SchemeParams& p,
                           const DiagnosticsSeries& diag) {
  const int n = static_cast<int>(diag.momenta.p_q[0].size());
  CsvFile csv(path);
  std::vector<std::string> header = {"k", "t", "noether", "h_new", "h_pontryagin"};
  for (int i = 0; i < n; ++i) header.push_back("pq" + std::to_string(i));
  for (int i = 0; i < n; ++i) header.push_back("plam" + std::to_string(i));
  header.push_back("match_defect");
  csv.row(header);
  for (size_t k = 0; k < diag.noether.size(); ++k) {
    std::vector<std::string> cells = {std::to_string(k), fmt(k * p.dt),
                                      fmt(diag.noether[k]), fmt(diag.hamiltonian_new[k]),
                                      fmt(diag.hamiltonian_pontryagin[k])};
    for (int i = 0; i < n; ++i) cells.push_back(fmt(diag.momenta.p_q[k](i)));
    for (int i = 0; i < n; ++i) cells.push_back(fmt(diag.momenta.p_lam[k](i)));
    cells.push_back(fmt(diag.momenta.matching_defect[k]));
    csv.row(cells);
  }
  csv.close();
}

}  // namespace

int run_solve(const RunConfig& cfg, std::ostream& log) {
  ModelSetup model = build_model(cfg);
  model.problem.horizon = cfg.horizon;
  if (!fs::is_directory(cfg.output_dir))
    throw IoError("output directory does not exist: " + cfg.output_dir.string());

  SchemeParams p = make_scheme(cfg.alpha, cfg.beta, cfg.gamma, cfg.num_steps, cfg.horizon);
  const Formulation form = cfg.formulation;
  const OCProblem& prob = model.problem;

  DiscreteTrajectory guess = initial_guess(prob, p, cfg.guess, form, model.guess_target,
                                           model.guess_path);
  Vec x0 = pack_trajectory(guess, form);
  ResidualFn F = [&prob, &p, form](const Vec& x) {
    DiscreteTrajectory t =
        unpack_trajectory(x, form, prob.system.n, prob.system.m, p.num_steps);
    return form == Formulation::Dependent ? assemble_dep(prob, p, t).values
                                          : assemble_indep(prob, p, t).values;
  };

  const auto t0 = std::chrono::steady_clock::now();
  auto [x, stats] = newton_solve(F, x0, cfg.solver);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  DiscreteTrajectory traj =
      unpack_trajectory(x, form, prob.system.n, prob.system.m, p.num_steps);
  auto [mu, nu] = recover_multipliers(prob, p, traj);
  traj.mu = mu;
  traj.nu = nu;

  AffineSymmetry sym = cfg.symmetry_override
                           ? *cfg.symmetry_override
                           : (model.symmetry ? *model.symmetry
                                             : AffineSymmetry{Mat::Zero(prob.system.n,
                                                                        prob.system.n),
                                                              Vec::Zero(prob.system.n)});
  DiagnosticsSeries diag = compute_diagnostics(prob, p, traj, sym);
  const double objective = form == Formulation::Dependent
                               ? augmented_objective_dep(prob, p, traj)
                               : augmented_objective_indep(prob, p, traj);

  const fs::path traj_path = cfg.output_dir / (cfg.output_prefix + "_trajectory.csv");
  const fs::path diag_path = cfg.output_dir / (cfg.output_prefix + "_diagnostics.csv");
  const fs::path summary_path = cfg.output_dir / (cfg.output_prefix + "_summary.json");
  write_trajectory_csv(traj_path, prob, p, traj, diag);
  write_diagnostics_csv(diag_path, p, diag);
  if (form == Formulation::Dependent)
    write_controls_csv(cfg.output_dir / (cfg.output_prefix + "_controls.csv"), p, traj);

  json summary;
  summary["model"] = cfg.model_id;
  summary["formulation"] =
      form == Formulation::Dependent ? "dependent" : "independent";
  summary["scheme"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"gamma", cfg.gamma}};
  summary["grid"] = {{"T", cfg.horizon}, {"N", p.num_steps}, {"h", p.dt}};
  summary["converged"] = stats.converged;
  summary["iterations"] = stats.iterations;
  summary["residual_norm"] = stats.residual_norm;
  summary["solver_message"] = stats.message;
  summary["objective"] = objective;
  summary["mu"] = std::vector<double>(mu.data(), mu.data() + mu.size());
  summary["nu"] = std::vector<double>(nu.data(), nu.data() + nu.size());
  summary["max_noether_drift"] = diag.max_noether_drift;
  summary["max_hamiltonian_drift"] = diag.max_hamiltonian_drift;
  summary["max_momentum_defect"] = diag.momenta.max_matching_defect;
  summary["noether_initial"] = diag.noether.front();
  summary["runtime_seconds"] = seconds;
  for (auto& [key, value] : model.summary_extras.items()) summary[key] = value;
  {
    std::ofstream out(summary_path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + summary_path.string());
    out << summary.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + summary_path.string());
  }

  log << (stats.converged ? "converged" : "NOT CONVERGED") << " in "
      << stats.iterations << " iterations, residual " << stats.residual_norm
      << " (" << seconds << " s)\n"
      << "artifacts: " << traj_path.string() << ", " << diag_path.string() << ", "
      << summary_path.string() << "\n";
  return stats.converged ? kExitOk : kExitNumerical;
}

int run_study(const RunConfig& cfg, std::ostream& log) {
  if (cfg.study_schemes.empty() || cfg.study_steps.empty())
    bad_config("study subcommand needs a study block with schemes and N");
  ModelSetup model = build_model(cfg);
  model.problem.horizon = cfg.horizon;
  if (!fs::is_directory(cfg.output_dir))
    throw IoError("output directory does not exist: " + cfg.output_dir.string());

  StudyOptions opt;
  opt.reference_steps = cfg.reference_steps;
  opt.solver = cfg.solver;
  opt.guess_target = model.guess_target;
  opt.guess_path = model.guess_path;
  StudyResult result =
      convergence_study(model.problem, cfg.study_schemes, cfg.study_steps, opt);

  const fs::path path = cfg.output_dir / (cfg.output_prefix + "_study.csv");
  CsvFile csv(path);
  csv.row({"scheme-id", "N", "h", "error", "fitted-slope"});
  for (const StudyRow& row : result.rows) {
    auto it = result.slopes.find(row.scheme_id);
    csv.row({row.scheme_id, std::to_string(row.num_steps), fmt(row.dt), fmt(row.error),
             it == result.slopes.end() ? "" : fmt(it->second)});
  }
  csv.close();

  for (const auto& [id, slope] : result.slopes)
    log << "scheme " << id << ": fitted slope " << slope << "\n";
  if (!result.all_converged) {
    log << "study aborted: " << result.failure << "\n";
    log << "partial table: " << path.string() << "\n";
    return kExitNumerical;
  }
  log << "study table: " << path.string() << "\n";
  return kExitOk;
}

int run_check(const RunConfig& cfg, std::ostream& log) {
  ModelSetup model = build_model(cfg);
  if (!model.probe_sampler) bad_config("model does not provide derivative probes");
  auto probes = model.probe_sampler(cfg.check_probes, cfg.check_seed);
  DerivativeReport sys_report = check_derivatives(model.problem.system, probes);
  DerivativeReport cost_report = check_terminal_cost(model.problem.terminal, probes);

  log << "derivative check over " << probes.size() << " probes\n";
  log << "  system:        max rel error " << sys_report.max_rel_error
      << (sys_report.passed ? "  [pass]" : "  [FAIL]") << "\n";
  log << "  terminal cost: max rel error " << cost_report.max_rel_error
      << (cost_report.passed ? "  [pass]" : "  [FAIL]") << "\n";
  return (sys_report.passed && cost_report.passed) ? kExitOk : kExitNumerical;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TrajectoryCsv read_trajectory_csv(const fs::path& path, int n, int m) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trajectory csv");
  TrajectoryCsv out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) < 2 + 2 * n + m)
      throw IoError("trajectory csv row too short");
    Vec q(n), lam(n), u(m);
    for (int i = 0; i < n; ++i) q(i) = std::stod(cells[2 + i]);
    for (int i = 0; i < n; ++i) lam(i) = std::stod(cells[2 + n + i]);
    for (int i = 0; i < m; ++i) u(i) = std::stod(cells[2 + 2 * n + i]);
    out.q.push_back(q);
    out.lam.push_back(lam);
    out.u_nodal.push_back(u);
  }
  return out;
}

ControlsCsv read_controls_csv(const fs::path& path, int m) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty controls csv");
  ControlsCsv out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) < 3 + 2 * m)
      throw IoError("controls csv row too short");
    Vec u1(m), u2(m);
    for (int i = 0; i < m; ++i) u1(i) = std::stod(cells[3 + i]);
    for (int i = 0; i < m; ++i) u2(i) = std::stod(cells[3 + m + i]);
    out.u1.push_back(u1);
    out.u2.push_back(u2);
  }
  return out;
}

}  // namespace varoc::io
