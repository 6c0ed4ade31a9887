#pragma once

#include <functional>

#include "susteer/integrator.hpp"
#include "susteer/reference.hpp"

namespace susteer {

enum class Axis { x, y, z };

/// Two coupled spin-1/2 particles with exchange interaction, driven by the
/// three field components. Lab frame: Ydot = (D + D_x u_x + D_y u_y + D_z u_z) Y.
/// Rotating-frame reduction keeps the six resonant generator directions.
struct SpinModel {
  Mat drift;            // diag(3i, -i, -i, -i)
  Mat dx, dy, dz;       // field coupling directions
  std::vector<Mat> h;   // resonant generators: HR14, HI14, HR13, HI13, HR12, HI12
  double omega = 4.0;   // carrier angular frequency (drift eigenvalue gap)

  static SpinModel make();
};

/// Goal gate for the n = 4 experiment: controlled-NOT with the phase convention
/// that puts it in SU(4) (det = +1).
Mat cnot_goal();

/// Interaction-picture coupling exp(-D t) D_axis exp(D t).
Mat interaction_generator(const SpinModel& model, Axis axis, double t);

/// Real field components from the six rotating-frame controls:
/// u_x = 2 u1 cos(omega t) - 2 u2 sin(omega t), and likewise (u3,u4) -> u_y,
/// (u5,u6) -> u_z.
Eigen::Vector3d recombine_controls(const SpinModel& model, const Eigen::VectorXd& u6, double t);

/// Sum_k u6_k H_k over the fixed resonant generator ordering.
Mat rwa_generator(const SpinModel& model, const Eigen::VectorXd& u6);

/// Integrates the lab-frame system with recombined controls from Y(0) = I.
Trajectory simulate_lab_frame(const SpinModel& model,
                              const std::function<Eigen::VectorXd(double)>& u6_of_t, double horizon,
                              const IntegratorConfig& cfg);

/// exp(-D t) Y: maps a lab-frame state into the rotating frame.
Mat to_rotating_frame(const SpinModel& model, double t, const Mat& y);

/// Integrates the lab-frame system and its rotating-frame reduction with the
/// same six controls (scaled Fourier table) and records the Frobenius gap.
struct RwaComparison {
  std::vector<double> t;
  std::vector<double> gap;  // ||X_lab_rotframe - X_reduced||_F
  double max_gap = 0.0;
};

RwaComparison compare_rwa(const SpinModel& model, const FourierControl& fc, double amplitude_scale,
                          double horizon, const IntegratorConfig& cfg);

}  // namespace susteer
