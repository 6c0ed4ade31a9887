#include "susteer/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace susteer {

namespace {
constexpr double kPi = std::numbers::pi;
}

nlohmann::json CriticalSet::to_json() const {
  auto snap = [](double x) -> nlohmann::json {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<long long>(r);
    return x;
  };
  nlohmann::json vals = nlohmann::json::array();
  for (double v : values) vals.push_back(snap(v));
  return {{"n", n}, {"values", std::move(vals)}, {"delta", snap(delta)}};
}

CriticalSet critical_levels(int n) {
  if (n < 2) throw std::invalid_argument("critical_levels: n >= 2 required");
  std::vector<double> cand;
  for (int n2 = 0; n2 < n; ++n2) {
    const int n1 = n - n2;
    if (n1 == n2) {
      // equal split: the value is 0 for any phase, admissible only when the
      // unit-product constraint exp(i n1 pi) = 1 holds
      if (n1 % 2 == 0) cand.push_back(0.0);
      continue;
    }
    const int period = std::abs(n - 2 * n2);
    for (int k = 0; k < period; ++k) {
      const double theta = (2.0 * k - n2) * kPi / static_cast<double>(n - 2 * n2);
      cand.push_back(static_cast<double>(n1 - n2) * std::cos(theta));
    }
  }
  std::sort(cand.begin(), cand.end());
  CriticalSet out;
  out.n = n;
  for (double x : cand) {
    if (out.values.empty() || x - out.values.back() > 1e-12) {
      out.values.push_back(x);
    }
  }
  for (double& x : out.values) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12) x = r;
  }
  out.delta = -static_cast<double>(n) - 1.0;
  for (double x : out.values) {
    if (x < static_cast<double>(n) - 1e-9) out.delta = std::max(out.delta, x);
  }
  return out;
}

PathPlan build_path(const Mat& goal, const CriticalSet& crit, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("build_path: margin > 0 required");
  const Mat g = normalize_su_phase(goal);
  require_unitary(g, "build_path goal");
  if (static_cast<int>(g.rows()) != crit.n) throw std::invalid_argument("build_path: dimension mismatch");

  const EigenPhases ep = unitary_eigenphases(g);
  const int n = crit.n;

  auto waypoint_fidelity = [&](int segs) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < ep.phases.size(); ++j) {
      s += std::cos(ep.phases(j) / static_cast<double>(segs));
    }
    return s;
  };

  int segs = 1;
  while (waypoint_fidelity(segs) <= crit.delta + margin) {
    ++segs;
    if (segs > 1000000) throw std::runtime_error("build_path: no admissible segment count found");
  }

  PathPlan plan;
  plan.phases = ep.phases;
  plan.segments = segs;
  plan.delta_theta = 1.0 / static_cast<double>(segs);
  plan.margin = margin;
  plan.waypoints.reserve(segs + 1);
  for (int l = 0; l <= segs; ++l) {
    const double scale = 1.0 - static_cast<double>(l) / static_cast<double>(segs);
    Eigen::VectorXcd d(n);
    for (int j = 0; j < n; ++j) d(j) = std::polar(1.0, ep.phases(j) * scale);
    plan.waypoints.push_back(ep.basis * d.asDiagonal() * ep.basis.adjoint());
  }
  return plan;
}

GluedPlan plan_segmented(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                         const FeedbackGains& gains, const CriticalSet& crit,
                         const PlannerConfig& cfg, const DerivativeTable* table) {
  if (ref.periodicity_residual() > 1e-5) {
    throw std::runtime_error("plan_segmented: reference periodicity residual exceeds the planning gate");
  }
  const int n = crit.n;
  GluedPlan out;
  out.branch = PlanBranch::segmented;
  out.path = build_path(goal, crit, cfg.margin);
  if (cfg.force_segments) {
    if (*cfg.force_segments < out.path.segments) {
      throw std::invalid_argument("plan_segmented: forced segment count below the admissible minimum");
    }
    out.path = build_path(goal, crit, cfg.margin);
    // rebuild waypoints at the forced count
    PathPlan forced;
    forced.phases = out.path.phases;
    forced.segments = *cfg.force_segments;
    forced.delta_theta = 1.0 / static_cast<double>(forced.segments);
    forced.margin = cfg.margin;
    const EigenPhases ep = unitary_eigenphases(normalize_su_phase(goal));
    for (int l = 0; l <= forced.segments; ++l) {
      const double scale = 1.0 - static_cast<double>(l) / static_cast<double>(forced.segments);
      Eigen::VectorXcd d(n);
      for (int j = 0; j < n; ++j) d(j) = std::polar(1.0, ep.phases(j) * scale);
      forced.waypoints.push_back(ep.basis * d.asDiagonal() * ep.basis.adjoint());
    }
    out.path = std::move(forced);
  }

  const int segs = out.path.segments;
  const double eps_seg = cfg.eps_seg_factor * static_cast<double>(n);
  const double eps_final = cfg.eps_final_factor * static_cast<double>(n);
  const double cap_len = cfg.segment_cap_periods * ref.period();

  out.run.n = n;
  out.run.m = static_cast<int>(h.size());
  out.run.stats.err_threshold_factor = cfg.track.err_threshold_factor;
  out.switch_times.push_back(0.0);

  // W_1(0) = Zbar_1^dag Zbar_0 (W_0 = I)
  Mat w = out.path.waypoints[1].adjoint() * out.path.waypoints[0];
  double t = 0.0;
  out.converged = true;

  for (int l = 1; l <= segs; ++l) {
    const bool last = (l == segs);
    const Mat& zbar = out.path.waypoints[l];
    std::function<bool(double, const Mat&)> stop;
    Mat advance;  // Zbar_{l+1}^dag Zbar_l
    if (last) {
      stop = [&, eps_final](double, const Mat& wl) {
        return fidelity(wl) > static_cast<double>(n) - eps_final;
      };
    } else {
      advance = out.path.waypoints[l + 1].adjoint() * zbar;
      stop = [&, advance, eps_seg](double, const Mat& wl) {
        return fidelity(advance * wl) > crit.delta + cfg.margin &&
               fidelity(wl) >= static_cast<double>(n) - eps_seg;
      };
    }

    SegmentRecord rec;
    rec.t_start = t;
    rec.v_entry = fidelity(w);
    rec.first_sample = out.run.t.size();

    const AuxSegment seg = run_auxiliary(w, t, ref, h, gains, stop, t + cap_len, cfg.track);
    append_segment(out.run, seg, zbar, ref, h, gains, cfg.track, table, !last);

    rec.t_end = seg.t_end;
    rec.v_exit = fidelity(seg.w_end);
    rec.stopped_by_rule = seg.stopped;
    rec.sample_count = out.run.t.size() - rec.first_sample;
    out.segments.push_back(rec);
    out.switch_times.push_back(seg.t_end);

    if (!seg.stopped) {
      out.converged = false;  // cap hit before the rule fired
      out.achieved_V = fidelity(Mat(zbar * seg.w_end));
      break;
    }

    if (last) {
      out.achieved_V = fidelity(seg.w_end);  // Z = W on the final segment
    } else {
      // hand over: W_{l+1}(T_{l+1}) = Zbar_{l+1}^dag Zbar_l W_l(T_{l+1})
      const Mat w_next = advance * seg.w_end;
      const Mat z_minus = zbar * seg.w_end;
      const Mat z_plus = out.path.waypoints[l + 1] * w_next;
      out.z_jump_max = std::max(out.z_jump_max, (z_plus - z_minus).norm());
      Eigen::VectorXd v_minus(out.run.m), v_plus(out.run.m);
      for (int k = 0; k < out.run.m; ++k) {
        v_minus(k) = gains.f(k) * feedback_coefficient(seg.t_end, seg.w_end, k, ref, h, gains);
        v_plus(k) = gains.f(k) * feedback_coefficient(seg.t_end, w_next, k, ref, h, gains);
      }
      out.v_jump_max = std::max(out.v_jump_max, (v_plus - v_minus).cwiseAbs().maxCoeff());
      w = w_next;
      t = seg.t_end;
    }
  }

  out.run.horizon = out.run.t.empty() ? 0.0 : out.run.t.back();
  finalize_stats(out.run);
  return out;
}

GluedPlan plan_direct(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
                      const FeedbackGains& gains, const CriticalSet& crit, const PlannerConfig& cfg,
                      const DerivativeTable* table) {
  const Mat g = normalize_su_phase(goal);
  GluedPlan out;
  out.branch = PlanBranch::direct;
  out.run = simulate_tracking(g, ref, h, gains, cfg.horizon, cfg.track, crit.delta, table);
  out.switch_times = {0.0, cfg.horizon};
  SegmentRecord rec;
  rec.t_start = 0.0;
  rec.t_end = cfg.horizon;
  rec.v_entry = fidelity(g);
  rec.v_exit = out.run.V.empty() ? rec.v_entry : out.run.V.back();
  rec.stopped_by_rule = false;
  rec.first_sample = 0;
  rec.sample_count = out.run.t.size();
  out.segments = {rec};
  out.achieved_V = rec.v_exit;
  out.converged = out.run.stats.first_time_err_below >= 0.0;
  out.path.segments = 1;
  out.path.margin = cfg.margin;
  return out;
}

GluedPlan plan(const Mat& goal, const ReferenceTrajectory& ref, const std::vector<Mat>& h,
               const FeedbackGains& gains, const CriticalSet& crit, const PlannerConfig& cfg,
               const DerivativeTable* table) {
  const Mat g = normalize_su_phase(goal);
  require_unitary(g, "plan goal");
  if (static_cast<int>(g.rows()) != crit.n) throw std::invalid_argument("plan: dimension mismatch");

  // boundary fidelities go to the safe branch
  if (fidelity(g) > crit.delta + cfg.margin) {
    return plan_direct(g, ref, h, gains, crit, cfg, table);
  }
  return plan_segmented(g, ref, h, gains, crit, cfg, table);
}

nlohmann::json plan_to_json(const GluedPlan& p) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : p.segments) {
    segs.push_back({{"t_start", s.t_start},
                    {"t_end", s.t_end},
                    {"v_entry", s.v_entry},
                    {"v_exit", s.v_exit},
                    {"stopped_by_rule", s.stopped_by_rule},
                    {"samples", s.sample_count}});
  }
  std::vector<double> phases(p.path.phases.data(), p.path.phases.data() + p.path.phases.size());
  return {{"branch", p.branch == PlanBranch::direct ? "direct" : "segmented"},
          {"n", p.run.n},
          {"segments", p.path.segments},
          {"phases", phases},
          {"switch_times", p.switch_times},
          {"segment_records", std::move(segs)},
          {"z_jump_max", p.z_jump_max},
          {"v_jump_max", p.v_jump_max},
          {"achieved_V", p.achieved_V},
          {"converged", p.converged}};
}

}  // namespace susteer
