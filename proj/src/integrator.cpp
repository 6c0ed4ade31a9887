#include "susteer/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace susteer {

namespace {

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// Truncated dexpinv. For Ydot = F*Y the update exponent obeys
// Omega' = F - [Omega,F]/2 + [Omega,[Omega,F]]/12 + O(h^4); for the
// right-acting system the odd terms flip sign.
Mat dexpinv_stage(const Mat& u, const Mat& k, bool left) {
  const Mat c1 = commutator(u, k);
  const Mat c2 = commutator(u, c1);
  return left ? Mat(k - 0.5 * c1 + c2 / 12.0) : Mat(k + 0.5 * c1 + c2 / 12.0);
}

Mat eval_rhs(const AlgebraRhs& f, double t, const Mat& state) {
  Mat k = f(t, state);
  if (k.rows() != state.rows() || k.cols() != state.cols()) {
    throw std::runtime_error("integrator: right-hand side dimension mismatch");
  }
  if (skew_error(k) > kTolSkew * std::max(1.0, k.norm())) {
    throw std::runtime_error("integrator: right-hand side is not skew-Hermitian within tolerance");
  }
  return k;
}

Mat step_lie(const Mat& y, double t, double h, const AlgebraRhs& f, bool left) {
  auto stage_state = [&](const Mat& u) -> Mat {
    const Mat e = expm(u);
    return left ? Mat(e * y) : Mat(y * e);
  };
  const Mat k1 = eval_rhs(f, t, y);
  const Mat u2 = (0.5 * h) * k1;
  const Mat kt2 = dexpinv_stage(u2, eval_rhs(f, t + 0.5 * h, stage_state(u2)), left);
  const Mat u3 = (0.5 * h) * kt2;
  const Mat kt3 = dexpinv_stage(u3, eval_rhs(f, t + 0.5 * h, stage_state(u3)), left);
  const Mat u4 = h * kt3;
  const Mat kt4 = dexpinv_stage(u4, eval_rhs(f, t + h, stage_state(u4)), left);
  const Mat omega = (h / 6.0) * (k1 + 2.0 * kt2 + 2.0 * kt3 + kt4);
  const Mat e = expm(omega);
  return left ? Mat(e * y) : Mat(y * e);
}

Mat step_project(const Mat& y, double t, double h, const AlgebraRhs& f, bool left) {
  auto xdot = [&](double tt, const Mat& s) -> Mat {
    const Mat k = eval_rhs(f, tt, s);
    return left ? Mat(k * s) : Mat(s * k);
  };
  const Mat k1 = xdot(t, y);
  const Mat k2 = xdot(t + 0.5 * h, y + (0.5 * h) * k1);
  const Mat k3 = xdot(t + 0.5 * h, y + (0.5 * h) * k2);
  const Mat k4 = xdot(t + h, y + h * k3);
  return project_to_unitary(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace

Mat step_left(const Mat& y, double t, double h, const AlgebraRhs& f, StepMethod method) {
  return method == StepMethod::lie_rk4 ? step_lie(y, t, h, f, true) : step_project(y, t, h, f, true);
}

Mat step_right(const Mat& w, double t, double h, const AlgebraRhs& f, StepMethod method) {
  return method == StepMethod::lie_rk4 ? step_lie(w, t, h, f, false) : step_project(w, t, h, f, false);
}

Trajectory integrate(const Mat& y0, double t0, double t1, const AlgebraRhs& f,
                     const IntegratorConfig& cfg, Side side) {
  if (!(cfg.step > 0.0) || cfg.dense_stride < 1) throw std::invalid_argument("integrate: bad config");
  if (t1 < t0) throw std::invalid_argument("integrate: t1 >= t0 required");

  Trajectory out;
  out.times.push_back(t0);
  out.states.push_back(y0);
  if (t1 == t0) return out;

  const double len = t1 - t0;
  long nsteps = static_cast<long>(std::ceil(len / cfg.step - 1e-9));
  if (nsteps < 1) nsteps = 1;

  Mat y = y0;
  for (long k = 0; k < nsteps; ++k) {
    const double ta = t0 + static_cast<double>(k) * cfg.step;
    const double tb = (k + 1 == nsteps) ? t1 : t0 + static_cast<double>(k + 1) * cfg.step;
    y = (side == Side::left) ? step_left(y, ta, tb - ta, f, cfg.method)
                             : step_right(y, ta, tb - ta, f, cfg.method);
    if ((k + 1) % cfg.dense_stride == 0 || k + 1 == nsteps) {
      out.times.push_back(tb);
      out.states.push_back(y);
    }
  }
  return out;
}

void Trajectory::write_csv(std::ostream& os, const std::string& prefix) const {
  if (states.empty()) return;
  const Eigen::Index n = states.front().rows();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      os << "," << prefix << "_re_" << (i + 1) << (j + 1) << "," << prefix << "_im_" << (i + 1) << (j + 1);
    }
  }
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
  };
  for (size_t r = 0; r < states.size(); ++r) {
    put(times[r]);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        os << ",";
        put(states[r](i, j).real());
        os << ",";
        put(states[r](i, j).imag());
      }
    }
    os << "\n";
  }
}

}  // namespace susteer
