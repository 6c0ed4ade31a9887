#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "susteer/su_core.hpp"

namespace susteer {

enum class StepMethod {
  lie_rk4,      // Runge-Kutta-Munthe-Kaas, exponential update exp(Omega) with Omega in su(n)
  rk4_project,  // classical RK4 followed by polar re-unitarization
};

enum class Side { left, right };

struct IntegratorConfig {
  double step = 1e-3;
  StepMethod method = StepMethod::lie_rk4;
  int dense_stride = 1;  // steps between recorded samples
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat> states;

  // Columns: t, then interleaved re/im entries row-major (<prefix>_re_ij, <prefix>_im_ij).
  void write_csv(std::ostream& os, const std::string& prefix = "x") const;
};

/// Algebra-valued right-hand side F(t, state) in su(n). Time-only systems
/// ignore the state argument; feedback systems are re-evaluated at the
/// internal stage states.
using AlgebraRhs = std::function<Mat(double, const Mat&)>;

// One 4th-order step of Ydot = F(t, Y) * Y (state on the right of the result;
// the generator acts from the left).
Mat step_left(const Mat& y, double t, double h, const AlgebraRhs& f,
              StepMethod method = StepMethod::lie_rk4);

// One 4th-order step of Wdot = W * F(t, W).
Mat step_right(const Mat& w, double t, double h, const AlgebraRhs& f,
               StepMethod method = StepMethod::lie_rk4);

/// Fixed-step march from t0 to t1 (a final partial step is allowed) with dense
/// samples every cfg.dense_stride steps; the endpoint is always recorded.
Trajectory integrate(const Mat& y0, double t0, double t1, const AlgebraRhs& f,
                     const IntegratorConfig& cfg, Side side);

}  // namespace susteer
