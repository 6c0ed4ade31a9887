#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "susteer/runio.hpp"

namespace {

using susteer::RunConfig;

RunConfig load_config(const std::string& preset, const std::string& config_path) {
  RunConfig cfg;
  if (!preset.empty()) {
    if (preset == "cnot") {
      cfg = RunConfig::cnot_preset();
    } else {
      throw std::runtime_error("unknown preset '" + preset + "'");
    }
  }
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot open config " + config_path);
    nlohmann::json j;
    is >> j;
    cfg = RunConfig::from_json(j);
  }
  return cfg;
}

void apply_goal(RunConfig& cfg, const std::string& goal) {
  if (goal.empty()) return;
  if (goal == "cnot" || goal == "identity" || goal == "minus_identity") {
    cfg.goal = goal;
    cfg.goal_matrix.reset();
    return;
  }
  std::ifstream is(goal);
  if (!is) throw std::runtime_error("cannot open goal file " + goal);
  nlohmann::json j;
  is >> j;
  cfg.goal = "explicit";
  cfg.goal_matrix = susteer::matrix_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"susteer: periodic-reference steering of driftless systems on SU(n)"};
  app.require_subcommand(1);

  int delta_n = 4;
  auto* cd = app.add_subcommand("compute-delta", "Print the critical value set and delta");
  cd->add_option("--n", delta_n, "matrix dimension");

  std::string preset, config_path, goal_arg, out_dir;
  std::optional<double> horizon_arg, step_arg, ref_step_arg;
  std::optional<int> jmax_arg;
  std::optional<std::uint64_t> seed_arg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", preset, "configuration preset (cnot)");
    sub->add_option("--config", config_path, "JSON run configuration file");
    sub->add_option("--goal", goal_arg, "goal preset (cnot|identity|minus_identity) or matrix JSON file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--horizon", horizon_arg, "tracking horizon");
    sub->add_option("--step", step_arg, "integrator step");
    sub->add_option("--ref-step", ref_step_arg, "reference integration step");
    sub->add_option("--j-max", jmax_arg, "derivative table depth");
    sub->add_option("--seed", seed_arg, "random coefficient seed");
  };

  auto* cr = app.add_subcommand("check-regularity", "Span test of the reference controls");
  add_common(cr);
  bool cr_random = false;
  double cr_amplitude = 5.0;
  int cr_nf = 5;
  cr->add_flag("--random", cr_random, "draw a random coefficient table");
  cr->add_option("--amplitude", cr_amplitude, "random coefficient bound");
  cr->add_option("--n-f", cr_nf, "random harmonic count");

  auto* pl = app.add_subcommand("plan", "Plan open-loop controls towards a goal");
  add_common(pl);

  auto* sim = app.add_subcommand("simulate", "Direct tracking run (goal must sit above delta)");
  add_common(sim);

  std::string plot_dir;
  auto* pt = app.add_subcommand("plot", "Render SVG plots from a run directory");
  pt->add_option("dir", plot_dir, "run directory containing run.csv")->required();

  auto* sm = app.add_subcommand("spin-model", "Two-spin model checks");
  sm->require_subcommand(1);
  auto* smv = sm->add_subcommand("verify-conjugation", "Compare rotating-frame couplings to closed forms");
  double rwa_scale = 1.0, rwa_horizon = 1.0;
  std::string rwa_csv;
  auto* smc = sm->add_subcommand("compare-rwa", "Lab-frame vs reduced-model comparison");
  smc->add_option("--amplitude-scale", rwa_scale, "control amplitude scale");
  smc->add_option("--horizon", rwa_horizon, "comparison horizon");
  smc->add_option("--csv", rwa_csv, "write the gap series to this CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cd->parsed()) return susteer::cmd_compute_delta(delta_n, std::cout, std::cerr);

    if (cr->parsed() || pl->parsed() || sim->parsed()) {
      RunConfig cfg = load_config(preset, config_path);
      apply_goal(cfg, goal_arg);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (horizon_arg) cfg.horizon = *horizon_arg;
      if (step_arg) cfg.step = *step_arg;
      if (ref_step_arg) cfg.ref_step = *ref_step_arg;
      if (jmax_arg) cfg.j_max = *jmax_arg;
      if (seed_arg) {
        cfg.fourier.source = "random";
        cfg.fourier.seed = *seed_arg;
      }
      if (cr->parsed()) {
        if (cr_random) {
          cfg.fourier.source = "random";
          cfg.fourier.amplitude = cr_amplitude;
          cfg.fourier.n_f = cr_nf;
        }
        if (preset.empty() && config_path.empty() && !cr_random && cfg.fourier.table.size() == 0) {
          cfg = RunConfig::cnot_preset();
        }
        return susteer::cmd_check_regularity(cfg, std::cout, std::cerr);
      }
      return susteer::cmd_plan(cfg, sim->parsed(), std::cout, std::cerr);
    }

    if (pt->parsed()) return susteer::cmd_plot(plot_dir, std::cout, std::cerr);
    if (smv->parsed()) return susteer::cmd_verify_conjugation(std::cout, std::cerr);
    if (smc->parsed()) return susteer::cmd_compare_rwa(rwa_scale, rwa_horizon, rwa_csv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
