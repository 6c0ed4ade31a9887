#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "susteer/planner.hpp"
#include "susteer/spin_model.hpp"

namespace susteer {

struct FourierSource {
  std::string source = "table";  // "table" | "random"
  Eigen::MatrixXd table;         // m x n_f, used when source == "table"
  double amplitude = 5.0;        // random draw bounds
  int n_f = 5;
  std::uint64_t seed = 1;
};

/// One fully serializable run description: identical configs reproduce the
/// emitted CSV artifacts byte for byte under the same build.
struct RunConfig {
  int n = 4;
  double T = 1.0;
  std::string generators = "spin4";     // preset name or "explicit"
  std::vector<Mat> generator_matrices;  // used when generators == "explicit"
  FourierSource fourier;
  std::vector<double> gains;  // empty means all ones
  double step = 1e-3;
  std::string method = "lie_rk4";  // "lie_rk4" | "rk4_project"
  int dense_stride = 1;
  int state_stride = 10;
  double ref_step = 1e-4;
  double horizon = 60.0;
  double err_threshold_factor = 0.1;
  double margin = 0.1;
  double eps_seg_factor = 0.05;
  double eps_final_factor = 0.01;
  double segment_cap_periods = 200.0;
  int j_max = 6;
  double rank_tol = 1e-8;
  std::string goal = "cnot";  // "cnot" | "identity" | "minus_identity" | "explicit"
  std::optional<Mat> goal_matrix;
  std::string output_dir = "out";

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig cnot_preset();
};

/// Recorded coefficient table of the n = 4 spin experiment (6 controls, 5 harmonics).
Eigen::MatrixXd spin4_table();

struct ResolvedSetup {
  std::vector<Mat> h;
  FourierControl fc;
  std::uint64_t seed_used = 0;
  Mat goal;
  FeedbackGains gains;
  StepMethod method = StepMethod::lie_rk4;
  TrackingConfig track;
  PlannerConfig planner;
};

/// Materializes generators, controls, goal and solver settings. The
/// SU_STEER_SEED environment variable overrides a random-source seed.
ResolvedSetup resolve(const RunConfig& cfg);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// CLI entry points; exit codes: 0 success, 1 domain failure, 2 usage error.
int cmd_compute_delta(int n, std::ostream& out, std::ostream& err);
int cmd_check_regularity(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_plan(const RunConfig& cfg, bool direct_only, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& run_dir, std::ostream& out, std::ostream& err);
int cmd_verify_conjugation(std::ostream& out, std::ostream& err);
int cmd_compare_rwa(double amplitude_scale, double horizon, const std::string& csv_path,
                    std::ostream& out, std::ostream& err);

// Artifact writers shared by commands and tests.
std::string run_csv_text(const TrackingRun& run);
std::string states_csv_text(const TrackingRun& run);
std::string diagnostics_csv_text(const TrackingRun& run);
void write_plan_artifacts(const std::filesystem::path& dir, const RunConfig& cfg,
                          const ResolvedSetup& setup, const GluedPlan& p, const CriticalSet& crit,
                          const RegularityReport& reg, double periodicity_residual,
                          std::optional<double> reconstruction_error);

}  // namespace susteer
