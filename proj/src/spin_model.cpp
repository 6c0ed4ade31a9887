#include "susteer/spin_model.hpp"

#include <cmath>
#include <stdexcept>

namespace susteer {

SpinModel SpinModel::make() {
  SpinModel m;
  m.drift = Mat::Zero(4, 4);
  m.drift(0, 0) = Complex(0.0, 3.0);
  m.drift(1, 1) = Complex(0.0, -1.0);
  m.drift(2, 2) = Complex(0.0, -1.0);
  m.drift(3, 3) = Complex(0.0, -1.0);
  m.dx = hr_generator(1, 4, 4) - 3.0 * hr_generator(2, 3, 4);
  m.dy = hr_generator(1, 3, 4) + 3.0 * hr_generator(2, 4, 4);
  m.dz = hr_generator(1, 2, 4) - 3.0 * hr_generator(3, 4, 4);
  m.h = {hr_generator(1, 4, 4), hi_generator(1, 4, 4), hr_generator(1, 3, 4),
         hi_generator(1, 3, 4), hr_generator(1, 2, 4), hi_generator(1, 2, 4)};
  m.omega = 4.0;
  require_su_element(m.drift, "SpinModel drift");
  require_su_element(m.dx, "SpinModel dx");
  require_su_element(m.dy, "SpinModel dy");
  require_su_element(m.dz, "SpinModel dz");
  return m;
}

Mat cnot_goal() {
  Mat g = Mat::Zero(4, 4);
  g(0, 0) = 1.0;
  g(1, 1) = 1.0;
  g(2, 3) = -1.0;
  g(3, 2) = 1.0;
  return g;
}

Mat interaction_generator(const SpinModel& model, Axis axis, double t) {
  const Mat* d = nullptr;
  switch (axis) {
    case Axis::x: d = &model.dx; break;
    case Axis::y: d = &model.dy; break;
    case Axis::z: d = &model.dz; break;
  }
  const Mat em = expm(Mat(-t * model.drift));
  const Mat ep = expm(Mat(t * model.drift));
  return em * (*d) * ep;
}

Eigen::Vector3d recombine_controls(const SpinModel& model, const Eigen::VectorXd& u6, double t) {
  if (u6.size() != 6) throw std::invalid_argument("recombine_controls: six controls required");
  const double c = std::cos(model.omega * t);
  const double s = std::sin(model.omega * t);
  Eigen::Vector3d u;
  u(0) = 2.0 * u6(0) * c - 2.0 * u6(1) * s;
  u(1) = 2.0 * u6(2) * c - 2.0 * u6(3) * s;
  u(2) = 2.0 * u6(4) * c - 2.0 * u6(5) * s;
  return u;
}

Mat rwa_generator(const SpinModel& model, const Eigen::VectorXd& u6) {
  if (u6.size() != 6) throw std::invalid_argument("rwa_generator: six controls required");
  Mat a = Mat::Zero(4, 4);
  for (int k = 0; k < 6; ++k) a += u6(k) * model.h[k];
  return a;
}

Trajectory simulate_lab_frame(const SpinModel& model,
                              const std::function<Eigen::VectorXd(double)>& u6_of_t, double horizon,
                              const IntegratorConfig& cfg) {
  AlgebraRhs rhs = [&model, &u6_of_t](double t, const Mat&) -> Mat {
    const Eigen::Vector3d u = recombine_controls(model, u6_of_t(t), t);
    return Mat(model.drift + u(0) * model.dx + u(1) * model.dy + u(2) * model.dz);
  };
  return integrate(Mat::Identity(4, 4), 0.0, horizon, rhs, cfg, Side::left);
}

Mat to_rotating_frame(const SpinModel& model, double t, const Mat& y) {
  Eigen::VectorXcd ph(4);
  for (int i = 0; i < 4; ++i) ph(i) = std::exp(-t * model.drift(i, i));
  return ph.asDiagonal() * y;
}

RwaComparison compare_rwa(const SpinModel& model, const FourierControl& fc, double amplitude_scale,
                          double horizon, const IntegratorConfig& cfg) {
  if (fc.controls() != 6) throw std::invalid_argument("compare_rwa: six Fourier controls required");
  auto u6 = [&](double t) -> Eigen::VectorXd { return amplitude_scale * fc.eval(t); };

  const Trajectory lab = simulate_lab_frame(model, u6, horizon, cfg);
  AlgebraRhs reduced_rhs = [&](double t, const Mat&) -> Mat { return rwa_generator(model, u6(t)); };
  const Trajectory reduced = integrate(Mat::Identity(4, 4), 0.0, horizon, reduced_rhs, cfg, Side::left);

  RwaComparison cmp;
  cmp.t = lab.times;
  cmp.gap.resize(lab.times.size());
  for (size_t i = 0; i < lab.times.size(); ++i) {
    const Mat x_lab = to_rotating_frame(model, lab.times[i], lab.states[i]);
    cmp.gap[i] = (x_lab - reduced.states[i]).norm();
    cmp.max_gap = std::max(cmp.max_gap, cmp.gap[i]);
  }
  return cmp;
}

}  // namespace susteer
