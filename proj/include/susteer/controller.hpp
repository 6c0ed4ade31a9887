#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "susteer/reference.hpp"

namespace susteer {

struct FeedbackGains {
  Eigen::VectorXd f;

  static FeedbackGains uniform(int m, double value = 1.0);
  void validate(int m) const;  // size m, every entry nonzero
};

/// a_k(t, W) = f_k * Re tr(W Xr(t)^dag H_k Xr(t)). Vanishes at W = I.
double feedback_coefficient(double t, const Mat& w, int k, const ReferenceTrajectory& ref,
                            const std::vector<Mat>& h, const FeedbackGains& gains);

/// Right-acting generator G(t, W) = Xr^dag (sum_k f_k a_k H_k) Xr of the
/// auxiliary system Wdot = W G(t, W). Along its flow d/dt Re tr(W) = sum a_k^2.
Mat auxiliary_rhs(double t, const Mat& w, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                  const FeedbackGains& gains);

/// max_{j,k} |Re tr(W goal^dag Bhat^j_k goal)| over the stored table, with each
/// table entry normalized to unit Frobenius norm. Zero on the invariant set the
/// auxiliary flow converges to; zero at W = I.
double limit_set_residual(const Mat& w, const DerivativeTable& table, const Mat& goal);

/// Spread max Im(mu) - min Im(mu) over the eigenvalues of W: zero exactly when
/// all eigenvalues share one imaginary part.
double phase_imag_spread(const Mat& w);

struct TrackingStats {
  double err0 = 0.0;
  double err_final = 0.0;
  double first_time_err_below = -1.0;  // first sample with err < factor * err0; -1 if never
  double err_threshold_factor = 0.1;
  double err_increase_max = 0.0;    // max over samples of err_{i+1} - err_i
  double identity_gap_max = 0.0;    // max |err^2 - (2n - 2 V)|
  double vdot_mismatch_max = 0.0;   // max |centered dV/dt - sum a_k^2|
  double vdot_forward_mismatch_max = 0.0;
  double unitarity_err_max = 0.0;
  double det_err_max = 0.0;
  std::vector<double> max_u_10;  // per-control max |u_k| on [0, 10]
  std::vector<double> max_v_10;
  double e_res_first = -1.0;
  double e_res_last = -1.0;
  double e_res_max = -1.0;
};

struct TrackingRun {
  int n = 0;
  int m = 0;
  double horizon = 0.0;
  std::vector<double> t;
  std::vector<double> err;  // ||X - Xr||_F
  std::vector<double> V;    // Re tr(Z)
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> v;
  std::vector<double> e_res;  // empty unless a derivative table was supplied
  std::vector<double> t_states;
  std::vector<Mat> X;
  std::vector<Mat> Xr;
  std::vector<Mat> Z;
  TrackingStats stats;
};

struct TrackingConfig {
  double step = 1e-3;
  StepMethod method = StepMethod::lie_rk4;
  int dense_stride = 1;   // scalar/control samples
  int state_stride = 10;  // full-matrix samples
  double err_threshold_factor = 0.1;
};

/// Direct tracking branch: integrates the auxiliary system from W(0) = goal
/// over [0, horizon] and reconstructs the plant trajectory X = Xr Z^dag, the
/// shifts v_k = f_k a_k and the open-loop controls u_k = u_k^ref - v_k.
/// Requires Re tr(goal) > delta (the critical level of the goal dimension).
TrackingRun simulate_tracking(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                              const FeedbackGains& gains, double horizon, const TrackingConfig& cfg,
                              double delta, const DerivativeTable* table = nullptr);

// Auxiliary-flow segment runner shared with the planner. The stop predicate is
// polled at every grid point; a null predicate runs to t_cap.
struct AuxSegment {
  std::vector<double> t;
  std::vector<Mat> w;
  double t_end = 0.0;
  Mat w_end;
  bool stopped = false;  // predicate fired before the cap
};

AuxSegment run_auxiliary(const Mat& w0, double t0, const ReferenceTrajectory& ref,
                         const std::vector<Mat>& h, const FeedbackGains& gains,
                         const std::function<bool(double, const Mat&)>& stop, double t_cap,
                         const TrackingConfig& cfg);

// Expands an auxiliary segment into per-sample tracking records under the left
// translate zbar (Z = zbar W, v_k = f_k a_k(t, W), u = u_ref - v, X = Xr Z^dag)
// and appends them to run. drop_last omits the segment's final sample, which
// reappears as the next segment's first. Slope checks are kept segment-local.
void append_segment(TrackingRun& run, const AuxSegment& seg, const Mat& zbar,
                    const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                    const FeedbackGains& gains, const TrackingConfig& cfg,
                    const DerivativeTable* table, bool drop_last);

// Fills the summary statistics from the assembled sample arrays.
void finalize_stats(TrackingRun& run);

/// Re-integrates the plant equation with the run's emitted control samples held
/// piecewise constant (nearest-sample hold, exact exponential substeps) and
/// returns the Frobenius gap to the run's final state.
double open_loop_reconstruction_error(const TrackingRun& run, const std::vector<Mat>& h);

}  // namespace susteer
