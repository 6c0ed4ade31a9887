#pragma once

#include <optional>
#include <string>
#include <vector>

#include "susteer/controller.hpp"

namespace susteer {

/// The finite set of values Re(tr) can take on the invariant limit sets of the
/// auxiliary flow: sums of n unimodular eigenvalues with unit product and a
/// common imaginary part. delta = max below n separates the guaranteed basin.
struct CriticalSet {
  int n = 0;
  std::vector<double> values;  // sorted, deduplicated, integer-snapped
  double delta = 0.0;

  nlohmann::json to_json() const;
};

CriticalSet critical_levels(int n);

/// Eigenphase interpolation from the goal to the identity, cut into N equal
/// steps so consecutive waypoints keep their relative fidelity above
/// delta + margin.
struct PathPlan {
  Eigen::VectorXd phases;      // zero-sum eigenphases of the goal
  int segments = 1;            // N
  std::vector<Mat> waypoints;  // N+1 entries, waypoints[0] ~ goal, waypoints[N] = I
  double delta_theta = 1.0;    // 1/N
  double margin = 0.0;
};

PathPlan build_path(const Mat& goal, const CriticalSet& crit, double margin);

enum class PlanBranch { direct, segmented };

struct SegmentRecord {
  double t_start = 0.0;
  double t_end = 0.0;
  double v_entry = 0.0;  // Re tr(W) at the segment start
  double v_exit = 0.0;
  bool stopped_by_rule = false;
  size_t first_sample = 0;  // index range into the concatenated run
  size_t sample_count = 0;
};

struct GluedPlan {
  PlanBranch branch = PlanBranch::direct;
  PathPlan path;
  std::vector<double> switch_times;  // T_1 = 0 .. T_{N+1} (end of the final segment)
  std::vector<SegmentRecord> segments;
  TrackingRun run;      // concatenated Z/v/u traces
  double z_jump_max = 0.0;
  double v_jump_max = 0.0;
  bool converged = false;
  double achieved_V = 0.0;
};

struct PlannerConfig {
  double margin = 0.1;            // additive slack on every strict inequality
  double eps_seg_factor = 0.05;   // segment exit needs Re tr(W) >= n (1 - factor)
  double eps_final_factor = 0.01; // final segment target Re tr(Z) > n (1 - factor)
  double segment_cap_periods = 200.0;
  double horizon = 60.0;          // direct-branch horizon
  TrackingConfig track;
  std::optional<int> force_segments;  // override the minimal N
};

/// Segmented construction for goals outside the direct basin: waypoint-by-
/// waypoint auxiliary runs glued into one continuous error trajectory. Each
/// switch time is the first grid point where the advance rule holds; the final
/// segment runs until Re tr(Z) > n - eps_final or its cap.
GluedPlan plan_segmented(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                         const FeedbackGains& gains, const CriticalSet& crit,
                         const PlannerConfig& cfg, const DerivativeTable* table = nullptr);

/// Single auxiliary run over cfg.horizon; requires Re tr(goal) > delta.
GluedPlan plan_direct(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                      const FeedbackGains& gains, const CriticalSet& crit, const PlannerConfig& cfg,
                      const DerivativeTable* table = nullptr);

/// Dispatch: the direct branch when Re tr(goal) > delta + margin, otherwise
/// the segmented construction. Boundary values go to the segmented branch.
GluedPlan plan(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
               const FeedbackGains& gains, const CriticalSet& crit, const PlannerConfig& cfg,
               const DerivativeTable* table = nullptr);

nlohmann::json plan_to_json(const GluedPlan& p);

}  // namespace susteer
