#include "susteer/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace susteer {

namespace {

double trace_product_re(const Mat& q, const Mat& h) {
  // Re tr(q h) without forming the product.
  return q.transpose().cwiseProduct(h).sum().real();
}

// a_k for all k at once: a_k = f_k Re tr(W Xr^dag H_k Xr) = f_k Re tr(Q H_k)
// with Q = Xr W Xr^dag.
Eigen::VectorXd all_coefficients(const Mat& xr, const Mat& w, const std::vector<Mat>& h,
                                 const Eigen::VectorXd& f) {
  const Mat q = xr * w * xr.adjoint();
  Eigen::VectorXd a(static_cast<Eigen::Index>(h.size()));
  for (size_t k = 0; k < h.size(); ++k) {
    a(static_cast<Eigen::Index>(k)) = f(static_cast<Eigen::Index>(k)) * trace_product_re(q, h[k]);
  }
  return a;
}

Mat aux_generator(const Mat& xr, const Mat& w, const std::vector<Mat>& h, const Eigen::VectorXd& f) {
  const Eigen::VectorXd a = all_coefficients(xr, w, h, f);
  Mat s = Mat::Zero(w.rows(), w.cols());
  for (size_t k = 0; k < h.size(); ++k) {
    s += (f(static_cast<Eigen::Index>(k)) * a(static_cast<Eigen::Index>(k))) * h[k];
  }
  Mat g = xr.adjoint() * s * xr;
  // enforce the algebra membership exactly (interpolated references are only
  // unitary to tolerance, which would otherwise leak into the trace)
  g = 0.5 * (g - g.adjoint());
  const Complex tr = g.trace() / static_cast<double>(g.rows());
  g -= tr * Mat::Identity(g.rows(), g.cols());
  return g;
}

struct LimitResidual {
  std::vector<Mat> contractions;  // goal^dag Bhat goal, unit-normalized table entries

  LimitResidual(const DerivativeTable& table, const Mat& goal) {
    for (const auto& level : table.b) {
      for (const Mat& b : level) {
        const double nrm = b.norm();
        if (nrm > 1e-14) contractions.push_back(goal.adjoint() * (b / nrm) * goal);
      }
    }
  }

  double eval(const Mat& w) const {
    double worst = 0.0;
    for (const Mat& c : contractions) {
      worst = std::max(worst, std::abs((w * c).trace().real()));
    }
    return worst;
  }
};

}  // namespace

void append_segment(TrackingRun& run, const AuxSegment& seg, const Mat& zbar,
                    const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                    const FeedbackGains& gains, const TrackingConfig& cfg,
                    const DerivativeTable* table, bool drop_last) {
  std::optional<LimitResidual> res;
  if (table) res.emplace(*table, ref.goal());
  const size_t count = seg.t.size() - (drop_last && seg.t.size() > 1 ? 1 : 0);
  const size_t base = run.t.size();
  std::vector<double> sum_a2(count, 0.0);
  for (size_t i = 0; i < count; ++i) {
    const double t = seg.t[i];
    const Mat& w = seg.w[i];
    const Mat xr = ref.at(t);
    const Eigen::VectorXd a = all_coefficients(xr, w, h, gains.f);
    const Eigen::VectorXd v = gains.f.cwiseProduct(a);
    const Eigen::VectorXd u = ref.control_values(t) - v;
    const Mat z = zbar * w;
    const Mat x = xr * z.adjoint();

    run.t.push_back(t);
    run.V.push_back(fidelity(z));
    run.err.push_back((x - xr).norm());
    run.u.push_back(u);
    run.v.push_back(v);
    if (res) run.e_res.push_back(res->eval(w));
    sum_a2[i] = a.squaredNorm();

    const bool state_sample = (i % static_cast<size_t>(cfg.state_stride) == 0) || i + 1 == count;
    if (state_sample) {
      run.t_states.push_back(t);
      run.X.push_back(x);
      run.Xr.push_back(xr);
      run.Z.push_back(z);
    }
  }
  // slope-vs-dissipation checks are segment-local (the shift v is only
  // piecewise continuous across planner switches)
  for (size_t i = 1; i + 1 < count; ++i) {
    const double dt2 = run.t[base + i + 1] - run.t[base + i - 1];
    if (dt2 <= 0.0) continue;
    const double centered = (run.V[base + i + 1] - run.V[base + i - 1]) / dt2;
    run.stats.vdot_mismatch_max =
        std::max(run.stats.vdot_mismatch_max, std::abs(centered - sum_a2[i]));
  }
  for (size_t i = 0; i + 1 < count; ++i) {
    const double dt = run.t[base + i + 1] - run.t[base + i];
    if (dt <= 0.0) continue;
    const double forward = (run.V[base + i + 1] - run.V[base + i]) / dt;
    run.stats.vdot_forward_mismatch_max =
        std::max(run.stats.vdot_forward_mismatch_max, std::abs(forward - sum_a2[i]));
  }
}

void finalize_stats(TrackingRun& run) {
  if (run.t.empty()) return;
  TrackingStats& st = run.stats;  // summary over the assembled arrays
  st.err0 = run.err.front();
  st.err_final = run.err.back();
  const double threshold = st.err_threshold_factor * st.err0;
  st.first_time_err_below = -1.0;
  for (size_t i = 0; i < run.t.size(); ++i) {
    if (run.err[i] < threshold) {
      st.first_time_err_below = run.t[i];
      break;
    }
  }
  for (size_t i = 0; i + 1 < run.t.size(); ++i) {
    st.err_increase_max = std::max(st.err_increase_max, run.err[i + 1] - run.err[i]);
  }
  const double two_n = 2.0 * static_cast<double>(run.n);
  for (size_t i = 0; i < run.t.size(); ++i) {
    const double gap = std::abs(run.err[i] * run.err[i] - (two_n - 2.0 * run.V[i]));
    st.identity_gap_max = std::max(st.identity_gap_max, gap);
  }
  st.max_u_10.assign(run.m, 0.0);
  st.max_v_10.assign(run.m, 0.0);
  for (size_t i = 0; i < run.t.size(); ++i) {
    if (run.t[i] > 10.0) break;
    for (int k = 0; k < run.m; ++k) {
      st.max_u_10[k] = std::max(st.max_u_10[k], std::abs(run.u[i](k)));
      st.max_v_10[k] = std::max(st.max_v_10[k], std::abs(run.v[i](k)));
    }
  }
  for (size_t i = 0; i < run.X.size(); ++i) {
    st.unitarity_err_max = std::max(st.unitarity_err_max, unitarity_error(run.Z[i]));
    st.det_err_max = std::max(st.det_err_max, det_error(run.Z[i]));
  }
  if (!run.e_res.empty()) {
    st.e_res_first = run.e_res.front();
    st.e_res_last = run.e_res.back();
    st.e_res_max = *std::max_element(run.e_res.begin(), run.e_res.end());
  }
}

FeedbackGains FeedbackGains::uniform(int m, double value) {
  FeedbackGains g;
  g.f = Eigen::VectorXd::Constant(m, value);
  g.validate(m);
  return g;
}

void FeedbackGains::validate(int m) const {
  if (f.size() != m) throw std::invalid_argument("FeedbackGains: size does not match control count");
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    if (f(k) == 0.0) throw std::invalid_argument("FeedbackGains: every gain must be nonzero");
  }
}

double feedback_coefficient(double t, const Mat& w, int k, const ReferenceTrajectory& ref,
                            const std::vector<Mat>& h, const FeedbackGains& gains) {
  if (k < 0 || k >= static_cast<int>(h.size())) throw std::invalid_argument("feedback_coefficient: bad index");
  const Mat xr = ref.at(t);
  return all_coefficients(xr, w, h, gains.f)(k);
}

Mat auxiliary_rhs(double t, const Mat& w, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                  const FeedbackGains& gains) {
  return aux_generator(ref.at(t), w, h, gains.f);
}

double limit_set_residual(const Mat& w, const DerivativeTable& table, const Mat& goal) {
  return LimitResidual(table, goal).eval(w);
}

double phase_imag_spread(const Mat& w) {
  Eigen::ComplexSchur<Mat> schur(w, false);
  if (schur.info() != Eigen::Success) throw std::runtime_error("phase_imag_spread: Schur failed");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double im = schur.matrixT()(i, i).imag();
    lo = std::min(lo, im);
    hi = std::max(hi, im);
  }
  return hi - lo;
}

AuxSegment run_auxiliary(const Mat& w0, double t0, const ReferenceTrajectory& ref,
                         const std::vector<Mat>& h, const FeedbackGains& gains,
                         const std::function<bool(double, const Mat&)>& stop, double t_cap,
                         const TrackingConfig& cfg) {
  if (!(cfg.step > 0.0) || cfg.dense_stride < 1 || cfg.state_stride < 1) {
    throw std::invalid_argument("run_auxiliary: bad config");
  }
  gains.validate(static_cast<int>(h.size()));
  AlgebraRhs rhs = [&ref, &h, &gains](double t, const Mat& w) -> Mat {
    return aux_generator(ref.at(t), w, h, gains.f);
  };

  AuxSegment seg;
  seg.t.push_back(t0);
  seg.w.push_back(w0);
  seg.t_end = t0;
  seg.w_end = w0;
  if (stop && stop(t0, w0)) {
    seg.stopped = true;
    return seg;
  }
  if (t_cap <= t0) return seg;

  Mat w = w0;
  for (long k = 0;; ++k) {
    const double ta = t0 + static_cast<double>(k) * cfg.step;
    double tb = t0 + static_cast<double>(k + 1) * cfg.step;
    const bool at_cap = tb >= t_cap - 1e-12;
    if (at_cap) tb = t_cap;
    w = step_right(w, ta, tb - ta, rhs, cfg.method);
    const bool fired = stop && stop(tb, w);
    if (fired || at_cap || (k + 1) % cfg.dense_stride == 0) {
      if (seg.t.back() != tb) {
        seg.t.push_back(tb);
        seg.w.push_back(w);
      }
    }
    if (fired || at_cap) {
      seg.t_end = tb;
      seg.w_end = w;
      seg.stopped = fired;
      break;
    }
  }
  return seg;
}

TrackingRun simulate_tracking(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                              const FeedbackGains& gains, double horizon, const TrackingConfig& cfg,
                              double delta, const DerivativeTable* table) {
  require_unitary(goal, "simulate_tracking goal");
  gains.validate(static_cast<int>(h.size()));
  if (!(fidelity(goal) > delta)) {
    throw std::invalid_argument(
        "simulate_tracking: goal fidelity is at or below the critical level; use the segmented planner");
  }
  if (ref.periodicity_residual() > 1e-5) {
    throw std::runtime_error("simulate_tracking: reference periodicity residual exceeds the planning gate");
  }
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate_tracking: horizon >= 0 required");

  const AuxSegment seg = run_auxiliary(goal, 0.0, ref, h, gains, nullptr, horizon, cfg);

  TrackingRun run;
  run.n = static_cast<int>(goal.rows());
  run.m = static_cast<int>(h.size());
  run.horizon = horizon;
  run.stats.err_threshold_factor = cfg.err_threshold_factor;
  append_segment(run, seg, Mat::Identity(run.n, run.n), ref, h, gains, cfg, table, false);
  finalize_stats(run);
  return run;
}

double open_loop_reconstruction_error(const TrackingRun& run, const std::vector<Mat>& h) {
  if (run.t.size() < 3 || run.X.empty()) {
    throw std::invalid_argument("open_loop_reconstruction_error: run too short");
  }
  const double g = run.t[1] - run.t[0];
  auto generator = [&](const Eigen::VectorXd& u) -> Mat {
    Mat a = Mat::Zero(run.n, run.n);
    for (size_t k = 0; k < h.size(); ++k) a += u(static_cast<Eigen::Index>(k)) * h[k];
    return a;
  };
  Mat x = Mat::Identity(run.n, run.n);
  const size_t last = run.t.size() - 1;
  x = expm((0.5 * g) * generator(run.u[0])) * x;
  for (size_t i = 1; i < last; ++i) x = expm(g * generator(run.u[i])) * x;
  x = expm((0.5 * g) * generator(run.u[last])) * x;
  return (x - run.X.back()).norm();
}

}  // namespace susteer
