#include "susteer/runio.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "susteer/svg.hpp"

namespace susteer {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json table_to_json(const Eigen::MatrixXd& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd table_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const auto cols = j[0].size();
  Eigen::MatrixXd t(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("config: ragged coefficient table");
    for (size_t c = 0; c < cols; ++c) t(i, c) = j[i][c].get<double>();
  }
  return t;
}

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

Eigen::MatrixXd spin4_table() {
  Eigen::MatrixXd a(6, 5);
  a << -2.00, -1.39, 4.66, 4.31, 1.80,
      -0.31, -1.54, 0.92, -3.20, -2.18,
      -4.69, -0.31, 1.75, 3.94, -1.11,
      -2.79, 0.77, 4.09, 2.34, 3.46,
      2.19, 0.60, -0.27, 0.43, -3.75,
      -0.18, -4.44, -1.38, -4.58, 2.59;
  return a;
}

RunConfig RunConfig::cnot_preset() {
  RunConfig cfg;
  cfg.n = 4;
  cfg.T = 1.0;
  cfg.generators = "spin4";
  cfg.fourier.source = "table";
  cfg.fourier.table = spin4_table();
  cfg.fourier.n_f = 5;
  cfg.fourier.amplitude = 5.0;
  cfg.gains = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  cfg.goal = "cnot";
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json f;
  f["source"] = fourier.source;
  if (fourier.source == "table") {
    f["coeffs"] = table_to_json(fourier.table);
  } else {
    f["amplitude"] = fourier.amplitude;
    f["n_f"] = fourier.n_f;
    f["seed"] = fourier.seed;
  }
  nlohmann::json gens;
  if (generators == "explicit") {
    gens = nlohmann::json::array();
    for (const Mat& g : generator_matrices) gens.push_back(matrix_to_json(g));
  } else {
    gens = generators;
  }
  nlohmann::json goal_j;
  if (goal == "explicit" && goal_matrix) {
    goal_j = matrix_to_json(*goal_matrix);
  } else {
    goal_j = goal;
  }
  return {{"n", n},
          {"T", T},
          {"generators", std::move(gens)},
          {"fourier", std::move(f)},
          {"gains", gains},
          {"integrator",
           {{"step", step}, {"method", method}, {"dense_stride", dense_stride}, {"state_stride", state_stride}}},
          {"ref_step", ref_step},
          {"horizon", horizon},
          {"err_threshold_factor", err_threshold_factor},
          {"margin", margin},
          {"eps_seg_factor", eps_seg_factor},
          {"eps_final_factor", eps_final_factor},
          {"segment_cap_periods", segment_cap_periods},
          {"j_max", j_max},
          {"rank_tol", rank_tol},
          {"goal", std::move(goal_j)},
          {"output_dir", output_dir}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.n = j.value("n", 4);
  cfg.T = j.value("T", 1.0);
  if (j.contains("generators")) {
    if (j["generators"].is_array()) {
      cfg.generators = "explicit";
      for (const auto& g : j["generators"]) cfg.generator_matrices.push_back(matrix_from_json(g));
    } else {
      cfg.generators = j["generators"].get<std::string>();
    }
  }
  if (j.contains("fourier")) {
    const auto& f = j["fourier"];
    cfg.fourier.source = f.value("source", "table");
    if (cfg.fourier.source == "table") {
      cfg.fourier.table = table_from_json(f.at("coeffs"));
    } else if (cfg.fourier.source == "random") {
      cfg.fourier.amplitude = f.value("amplitude", 5.0);
      cfg.fourier.n_f = f.value("n_f", 5);
      cfg.fourier.seed = f.value("seed", std::uint64_t{1});
    } else {
      throw std::invalid_argument("config: fourier.source must be 'table' or 'random'");
    }
  }
  cfg.gains = j.value("gains", std::vector<double>{});
  if (j.contains("integrator")) {
    const auto& it = j["integrator"];
    cfg.step = it.value("step", 1e-3);
    cfg.method = it.value("method", "lie_rk4");
    cfg.dense_stride = it.value("dense_stride", 1);
    cfg.state_stride = it.value("state_stride", 10);
  }
  cfg.ref_step = j.value("ref_step", 1e-4);
  cfg.horizon = j.value("horizon", 60.0);
  cfg.err_threshold_factor = j.value("err_threshold_factor", 0.1);
  cfg.margin = j.value("margin", 0.1);
  cfg.eps_seg_factor = j.value("eps_seg_factor", 0.05);
  cfg.eps_final_factor = j.value("eps_final_factor", 0.01);
  cfg.segment_cap_periods = j.value("segment_cap_periods", 200.0);
  cfg.j_max = j.value("j_max", cfg.n == 4 ? 6 : cfg.n * cfg.n);
  cfg.rank_tol = j.value("rank_tol", 1e-8);
  if (j.contains("goal")) {
    if (j["goal"].is_object()) {
      cfg.goal = "explicit";
      cfg.goal_matrix = matrix_from_json(j["goal"]);
    } else {
      cfg.goal = j["goal"].get<std::string>();
    }
  }
  cfg.output_dir = j.value("output_dir", "out");
  return cfg;
}

ResolvedSetup resolve(const RunConfig& cfg) {
  ResolvedSetup s;
  if (cfg.generators == "spin4") {
    if (cfg.n != 4) throw DomainError("resolve: the spin4 preset requires n = 4");
    s.h = SpinModel::make().h;
  } else if (cfg.generators == "explicit") {
    if (cfg.generator_matrices.empty()) throw DomainError("resolve: no explicit generators given");
    s.h = cfg.generator_matrices;
    for (const Mat& g : s.h) {
      if (g.rows() != cfg.n) throw DomainError("resolve: generator dimension does not match n");
      require_su_element(g, "resolve generator");
    }
  } else {
    throw DomainError("resolve: unknown generator preset '" + cfg.generators + "'");
  }

  const int m = static_cast<int>(s.h.size());
  s.seed_used = cfg.fourier.seed;
  if (cfg.fourier.source == "table") {
    if (cfg.fourier.table.rows() != m) throw DomainError("resolve: coefficient rows must match control count");
    s.fc.T = cfg.T;
    s.fc.coeffs = cfg.fourier.table;
  } else {
    if (const char* env = std::getenv("SU_STEER_SEED")) {
      s.seed_used = std::strtoull(env, nullptr, 10);
    }
    s.fc = FourierControl::random(m, cfg.fourier.n_f, cfg.fourier.amplitude, cfg.T, s.seed_used);
  }

  if (cfg.goal == "cnot") {
    if (cfg.n != 4) throw DomainError("resolve: the cnot goal requires n = 4");
    s.goal = cnot_goal();
  } else if (cfg.goal == "identity") {
    s.goal = Mat::Identity(cfg.n, cfg.n);
  } else if (cfg.goal == "minus_identity") {
    if (cfg.n % 2 != 0) throw DomainError("resolve: -I lies in SU(n) only for even n");
    s.goal = -Mat::Identity(cfg.n, cfg.n);
  } else if (cfg.goal == "explicit") {
    if (!cfg.goal_matrix) throw DomainError("resolve: explicit goal without a matrix");
    s.goal = *cfg.goal_matrix;
  } else {
    throw DomainError("resolve: unknown goal '" + cfg.goal + "'");
  }
  require_unitary(s.goal, "resolve goal");
  s.goal = normalize_su_phase(s.goal);

  if (cfg.gains.empty()) {
    s.gains = FeedbackGains::uniform(m);
  } else {
    if (static_cast<int>(cfg.gains.size()) != m) throw DomainError("resolve: gain count must match controls");
    s.gains.f = Eigen::Map<const Eigen::VectorXd>(cfg.gains.data(), m);
    s.gains.validate(m);
  }

  if (cfg.method == "lie_rk4") {
    s.method = StepMethod::lie_rk4;
  } else if (cfg.method == "rk4_project") {
    s.method = StepMethod::rk4_project;
  } else {
    throw DomainError("resolve: unknown integrator method '" + cfg.method + "'");
  }

  s.track.step = cfg.step;
  s.track.method = s.method;
  s.track.dense_stride = cfg.dense_stride;
  s.track.state_stride = cfg.state_stride;
  s.track.err_threshold_factor = cfg.err_threshold_factor;

  s.planner.margin = cfg.margin;
  s.planner.eps_seg_factor = cfg.eps_seg_factor;
  s.planner.eps_final_factor = cfg.eps_final_factor;
  s.planner.segment_cap_periods = cfg.segment_cap_periods;
  s.planner.horizon = cfg.horizon;
  s.planner.track = s.track;
  return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string run_csv_text(const TrackingRun& run) {
  std::ostringstream os;
  os << "t,err,V_Z";
  for (int k = 1; k <= run.m; ++k) os << ",u_" << k;
  for (int k = 1; k <= run.m; ++k) os << ",v_" << k;
  os << "\n";
  for (size_t i = 0; i < run.t.size(); ++i) {
    os << fmt17(run.t[i]) << "," << fmt17(run.err[i]) << "," << fmt17(run.V[i]);
    for (int k = 0; k < run.m; ++k) os << "," << fmt17(run.u[i](k));
    for (int k = 0; k < run.m; ++k) os << "," << fmt17(run.v[i](k));
    os << "\n";
  }
  return os.str();
}

std::string states_csv_text(const TrackingRun& run) {
  std::ostringstream os;
  os << "t";
  const char* prefixes[3] = {"x", "xr", "z"};
  for (const char* p : prefixes) {
    for (int i = 1; i <= run.n; ++i) {
      for (int j = 1; j <= run.n; ++j) {
        os << "," << p << "_re_" << i << j << "," << p << "_im_" << i << j;
      }
    }
  }
  os << "\n";
  for (size_t r = 0; r < run.t_states.size(); ++r) {
    os << fmt17(run.t_states[r]);
    const Mat* mats[3] = {&run.X[r], &run.Xr[r], &run.Z[r]};
    for (const Mat* m : mats) {
      for (int i = 0; i < run.n; ++i) {
        for (int j = 0; j < run.n; ++j) {
          os << "," << fmt17((*m)(i, j).real()) << "," << fmt17((*m)(i, j).imag());
        }
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string diagnostics_csv_text(const TrackingRun& run) {
  std::ostringstream os;
  os << "t,e_residual\n";
  for (size_t i = 0; i < run.e_res.size(); ++i) {
    os << fmt17(run.t[i]) << "," << fmt17(run.e_res[i]) << "\n";
  }
  return os.str();
}

namespace {

std::string error_svg(const TrackingRun& run) {
  PlotPanel panel;
  panel.title = "Tracking error";
  panel.x_label = "t";
  panel.y_label = "||X - Xr||_F";
  PlotSeries s;
  s.label = "err";
  s.x = run.t;
  s.y = run.err;
  panel.series.push_back(std::move(s));
  return render_svg({panel});
}

std::string controls_svg(const TrackingRun& run) {
  PlotPanel up, vp;
  up.title = "Controls on [0, 10]";
  up.x_label = "t";
  up.y_label = "u_k";
  vp.title = "Control shifts on [0, 10]";
  vp.x_label = "t";
  vp.y_label = "v_k";
  const char* colors[2] = {"#1f6fb2", "#c04a3a"};
  for (int k = 0; k < std::min(2, run.m); ++k) {
    PlotSeries su, sv;
    su.label = "u_" + std::to_string(k + 1);
    sv.label = "v_" + std::to_string(k + 1);
    su.color = sv.color = colors[k];
    for (size_t i = 0; i < run.t.size() && run.t[i] <= 10.0; ++i) {
      su.x.push_back(run.t[i]);
      su.y.push_back(run.u[i](k));
      sv.x.push_back(run.t[i]);
      sv.y.push_back(run.v[i](k));
    }
    up.series.push_back(std::move(su));
    vp.series.push_back(std::move(sv));
  }
  return render_svg({up, vp});
}

nlohmann::json stats_json(const TrackingRun& run) {
  const TrackingStats& st = run.stats;
  nlohmann::json j{{"err0", st.err0},
                   {"err_final", st.err_final},
                   {"first_time_err_below", st.first_time_err_below},
                   {"err_threshold_factor", st.err_threshold_factor},
                   {"err_increase_max", st.err_increase_max},
                   {"identity_gap_max", st.identity_gap_max},
                   {"vdot_mismatch_max", st.vdot_mismatch_max},
                   {"vdot_forward_mismatch_max", st.vdot_forward_mismatch_max},
                   {"unitarity_err_max", st.unitarity_err_max},
                   {"det_err_max", st.det_err_max},
                   {"max_u_0_10", st.max_u_10},
                   {"max_v_0_10", st.max_v_10}};
  if (st.e_res_first >= 0.0) {
    j["e_residual_first"] = st.e_res_first;
    j["e_residual_last"] = st.e_res_last;
    j["e_residual_max"] = st.e_res_max;
  }
  return j;
}

}  // namespace

void write_plan_artifacts(const std::filesystem::path& dir, const RunConfig& cfg,
                          const ResolvedSetup& setup, const GluedPlan& p, const CriticalSet& crit,
                          const RegularityReport& reg, double periodicity_residual,
                          std::optional<double> reconstruction_error) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "plan.json", plan_to_json(p).dump(2) + "\n");
  write_file_atomic(dir / "run.csv", run_csv_text(p.run));
  write_file_atomic(dir / "states.csv", states_csv_text(p.run));
  if (!p.run.e_res.empty()) {
    write_file_atomic(dir / "diagnostics.csv", diagnostics_csv_text(p.run));
  }

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["config"] = cfg.to_json();
  meta["seed_used"] = setup.seed_used;
  meta["branch"] = p.branch == PlanBranch::direct ? "direct" : "segmented";
  meta["horizon"] = p.run.horizon;
  meta["periodicity_residual"] = periodicity_residual;
  meta["regularity"] = reg.to_json();
  meta["critical_set"] = crit.to_json();
  meta["stats"] = stats_json(p.run);
  meta["switch_times"] = p.switch_times;
  meta["z_jump_max"] = p.z_jump_max;
  meta["v_jump_max"] = p.v_jump_max;
  meta["achieved_V"] = p.achieved_V;
  meta["converged"] = p.converged;
  if (reconstruction_error) meta["reconstruction_error"] = *reconstruction_error;
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");

  write_file_atomic(dir / "error.svg", error_svg(p.run));
  write_file_atomic(dir / "controls.svg", controls_svg(p.run));
}

int cmd_compute_delta(int n, std::ostream& out, std::ostream& err) {
  try {
    const CriticalSet crit = critical_levels(n);
    out << crit.to_json().dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: n >= 2 required (" << e.what() << ")\n";
    return 1;
  }
}

int cmd_check_regularity(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const ResolvedSetup setup = resolve(cfg);
    double residual = 0.0;
    IntegratorConfig icfg;
    icfg.step = cfg.ref_step;
    icfg.method = setup.method;
    icfg.dense_stride = 1 << 20;  // endpoint only
    integrate_reference(setup.fc, setup.h, icfg, &residual);
    const RegularityReport rep = regularity_check(setup.fc, setup.h, cfg.j_max, cfg.rank_tol);
    nlohmann::json j = rep.to_json();
    j["periodicity_residual"] = residual;
    j["seed_used"] = setup.seed_used;
    if (residual > 1e-7) {
      j["warning"] = "periodicity residual above 1e-7; consider a smaller ref_step";
    }
    out << j.dump(2) << "\n";
    return rep.is_regular ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_plan(const RunConfig& cfg, bool direct_only, std::ostream& out, std::ostream& err) {
  try {
    const ResolvedSetup setup = resolve(cfg);
    const ReferenceTrajectory ref(setup.fc, setup.h, setup.goal, cfg.ref_step, setup.method);
    if (ref.periodicity_residual() > 1e-7) {
      err << "warning: periodicity residual " << ref.periodicity_residual()
          << " above 1e-7; consider a smaller ref_step\n";
    }
    if (ref.periodicity_residual() > 1e-5) {
      err << "error: periodicity residual above the planning gate 1e-5\n";
      return 1;
    }
    const RegularityReport reg = regularity_check(setup.fc, setup.h, cfg.j_max, cfg.rank_tol);
    if (!reg.is_regular) {
      err << "error: reference controls are not regular at j_max " << cfg.j_max << " (rank " << reg.rank
          << " of " << reg.required << ")\n";
      return 1;
    }
    const CriticalSet crit = critical_levels(cfg.n);
    const DerivativeTable table = derivative_table(setup.fc, setup.h, cfg.j_max);

    const GluedPlan p = direct_only
                            ? plan_direct(setup.goal, ref, setup.h, setup.gains, crit, setup.planner, &table)
                            : plan(setup.goal, ref, setup.h, setup.gains, crit, setup.planner, &table);

    std::optional<double> rec_err;
    if (p.run.t.size() >= 3) rec_err = open_loop_reconstruction_error(p.run, setup.h);

    write_plan_artifacts(cfg.output_dir, cfg, setup, p, crit, reg, ref.periodicity_residual(), rec_err);
    out << "branch: " << (p.branch == PlanBranch::direct ? "direct" : "segmented") << "\n"
        << "achieved_V: " << p.achieved_V << "\n"
        << "converged: " << (p.converged ? "true" : "false") << "\n"
        << "artifacts: " << cfg.output_dir << "\n";
    return p.converged ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty csv " + path.string());
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

int cmd_plot(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  try {
    const std::filesystem::path dir(run_dir);
    const CsvTable t = read_csv(dir / "run.csv");
    const int ct = t.col("t");
    const int ce = t.col("err");
    if (ct < 0 || ce < 0 || t.rows.empty()) throw std::runtime_error("run.csv lacks t/err data");

    PlotPanel ep;
    ep.title = "Tracking error";
    ep.x_label = "t";
    ep.y_label = "||X - Xr||_F";
    PlotSeries es;
    es.label = "err";
    for (const auto& r : t.rows) {
      es.x.push_back(r[ct]);
      es.y.push_back(r[ce]);
    }
    ep.series.push_back(std::move(es));
    write_file_atomic(dir / "error.svg", render_svg({ep}));

    PlotPanel up, vp;
    up.title = "Controls on [0, 10]";
    up.x_label = "t";
    up.y_label = "u_k";
    vp.title = "Control shifts on [0, 10]";
    vp.x_label = "t";
    vp.y_label = "v_k";
    const char* colors[2] = {"#1f6fb2", "#c04a3a"};
    for (int k = 1; k <= 2; ++k) {
      const int cu = t.col("u_" + std::to_string(k));
      const int cv = t.col("v_" + std::to_string(k));
      if (cu < 0 || cv < 0) continue;
      PlotSeries su, sv;
      su.label = "u_" + std::to_string(k);
      sv.label = "v_" + std::to_string(k);
      su.color = sv.color = colors[k - 1];
      for (const auto& r : t.rows) {
        if (r[ct] > 10.0) break;
        su.x.push_back(r[ct]);
        su.y.push_back(r[cu]);
        sv.x.push_back(r[ct]);
        sv.y.push_back(r[cv]);
      }
      up.series.push_back(std::move(su));
      vp.series.push_back(std::move(sv));
    }
    write_file_atomic(dir / "controls.svg", render_svg({up, vp}));
    out << "plots written to " << run_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify_conjugation(std::ostream& out, std::ostream& err) {
  try {
    const SpinModel model = SpinModel::make();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = 0.12 * static_cast<double>(i);
      // closed forms of the rotating-frame couplings
      Mat cx = Mat::Zero(4, 4), cy = Mat::Zero(4, 4), cz = Mat::Zero(4, 4);
      const Complex em = std::polar(1.0, -model.omega * t);
      const Complex ep = std::polar(1.0, model.omega * t);
      cx(0, 3) = em; cx(1, 2) = -3.0; cx(2, 1) = 3.0; cx(3, 0) = -ep;
      cy(0, 2) = em; cy(1, 3) = 3.0; cy(2, 0) = -ep; cy(3, 1) = -3.0;
      cz(0, 1) = em; cz(1, 0) = -ep; cz(2, 3) = -3.0; cz(3, 2) = 3.0;
      worst = std::max(worst, (interaction_generator(model, Axis::x, t) - cx).cwiseAbs().maxCoeff());
      worst = std::max(worst, (interaction_generator(model, Axis::y, t) - cy).cwiseAbs().maxCoeff());
      worst = std::max(worst, (interaction_generator(model, Axis::z, t) - cz).cwiseAbs().maxCoeff());
    }
    out << nlohmann::json{{"max_entry_error", worst}, {"pass", worst <= 1e-12}}.dump() << "\n";
    return worst <= 1e-12 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare_rwa(double amplitude_scale, double horizon, const std::string& csv_path,
                    std::ostream& out, std::ostream& err) {
  try {
    const SpinModel model = SpinModel::make();
    FourierControl fc;
    fc.T = 1.0;
    fc.coeffs = spin4_table();
    IntegratorConfig cfg;
    cfg.step = 1e-4;
    cfg.dense_stride = 100;
    const RwaComparison cmp = compare_rwa(model, fc, amplitude_scale, horizon, cfg);
    if (!csv_path.empty()) {
      std::ostringstream os;
      os << "t,gap\n";
      for (size_t i = 0; i < cmp.t.size(); ++i) {
        os << fmt17(cmp.t[i]) << "," << fmt17(cmp.gap[i]) << "\n";
      }
      write_file_atomic(csv_path, os.str());
    }
    out << nlohmann::json{{"amplitude_scale", amplitude_scale},
                          {"horizon", horizon},
                          {"max_gap", cmp.max_gap}}
               .dump()
        << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace susteer
