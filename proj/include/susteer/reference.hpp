#pragma once

#include <cstdint>
#include <vector>

#include "susteer/integrator.hpp"

namespace susteer {

/// Odd sine series u_k(t) = sum_l coeffs(k,l) sin(2 pi l t / T). Vanishes at
/// t = 0 and t = T and is odd about T/2 by construction.
struct FourierControl {
  double T = 1.0;
  Eigen::MatrixXd coeffs;  // m x n_f

  int controls() const { return static_cast<int>(coeffs.rows()); }
  int harmonics() const { return static_cast<int>(coeffs.cols()); }

  Eigen::VectorXd eval(double t) const;
  double eval_one(int k, double t) const;  // k is 0-based

  /// Coefficient of t^p in the series of u_k at t = 0 (exact; even p gives 0).
  double taylor_coeff_at_zero(int k, int p) const;

  /// Coefficients drawn uniformly from [-amplitude, amplitude] with a recorded seed.
  static FourierControl random(int m, int n_f, double amplitude, double T, std::uint64_t seed);

  nlohmann::json to_json() const;
  static FourierControl from_json(const nlohmann::json& j);
};

/// Truncated Taylor polynomial with matrix coefficients; all arithmetic is
/// exact on the retained degrees.
class MatrixTaylor {
 public:
  MatrixTaylor(int n, int degree);
  static MatrixTaylor constant(const Mat& a, int degree);

  int dim() const { return n_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Mat& coeff(int j) const { return c_.at(j); }
  Mat& coeff(int j) { return c_.at(j); }

  MatrixTaylor operator+(const MatrixTaylor& o) const;
  MatrixTaylor operator-(const MatrixTaylor& o) const;
  MatrixTaylor operator*(const MatrixTaylor& o) const;
  MatrixTaylor derivative() const;  // loses one degree

 private:
  int n_;
  std::vector<Mat> c_;
};

/// Constant terms of the iterated-derivative recursion along the periodic
/// reference: b[0][k] = H_k and b[j+1][k] is the constant term of
/// -A(t) B_k^j(t) + d/dt B_k^j(t), evaluated in Taylor arithmetic at t = 0.
struct DerivativeTable {
  int n = 0;
  int m = 0;
  int j_max = 0;
  std::vector<std::vector<Mat>> b;  // b[j][k]
};

DerivativeTable derivative_table(const FourierControl& fc, const std::vector<Mat>& h, int j_max);

struct RegularityReport {
  int j_max = 0;
  int rank = 0;
  int required = 0;  // n^2 - 1
  std::vector<double> singular_values;
  bool is_regular = false;
  int lie_dim = 0;  // closure dimension of the generators themselves

  nlohmann::json to_json() const;
};

/// Span test of the derivative table: regular iff rank == n^2 - 1. A rank
/// short of that at finite j_max does not certify the converse; the report
/// carries the truncation order so callers can retry deeper.
RegularityReport regularity_check(const FourierControl& fc, const std::vector<Mat>& h, int j_max,
                                  double rank_tol = 1e-8);

// A(t) = sum_k u_k(t) H_k.
AlgebraRhs reference_rhs(const FourierControl& fc, const std::vector<Mat>& h);

/// One period of the core trajectory (initial state I) under the Fourier
/// controls. If residual_out is non-null it receives ||X(T) - I||_F.
Trajectory integrate_reference(const FourierControl& fc, const std::vector<Mat>& h,
                               const IntegratorConfig& cfg, double* residual_out = nullptr);

/// The reference X_r(t) = X_core(t mod T) * goal, with the core period stored
/// densely at the integration step. Off-grid queries use cubic interpolation
/// followed by polar re-unitarization.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory(const FourierControl& fc, const std::vector<Mat>& h, const Mat& goal,
                      double ref_step, StepMethod method = StepMethod::lie_rk4);

  double period() const { return fc_.T; }
  double periodicity_residual() const { return residual_; }
  const Mat& goal() const { return goal_; }
  const FourierControl& controls() const { return fc_; }
  double grid_step() const { return grid_step_; }

  Eigen::VectorXd control_values(double t) const { return fc_.eval(t); }
  Mat core_at(double t) const;  // X_core(t mod T)
  Mat at(double t) const;       // X_r(t)

 private:
  FourierControl fc_;
  Mat goal_;
  double grid_step_ = 0.0;
  std::vector<Mat> grid_;  // X_core at i * grid_step, i = 0..N (grid_[N] ~ I)
  double residual_ = 0.0;
};

}  // namespace susteer
