#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "susteer/reference.hpp"
#include "susteer/runio.hpp"
#include "susteer/spin_model.hpp"
#include "test_support.hpp"

using namespace susteer;
using test_support::max_abs_diff;

namespace {
constexpr double kPi = std::numbers::pi;

FourierControl spin_controls() {
  FourierControl fc;
  fc.T = 1.0;
  fc.coeffs = spin4_table();
  return fc;
}
}  // namespace

TEST_CASE("sine series evaluation") {
  FourierControl fc;
  fc.T = 1.0;
  fc.coeffs = Eigen::MatrixXd::Zero(2, 3);
  fc.coeffs(0, 0) = 1.0;
  CHECK(fc.eval(0.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fc.eval(0.25)(0) == doctest::Approx(1.0));  // sin(pi/2)
  CHECK(fc.eval(0.25)(1) == 0.0);

  const FourierControl sp = spin_controls();
  CHECK(sp.eval(0.0).cwiseAbs().maxCoeff() == 0.0);
  double direct = 0.0;
  for (int l = 1; l <= 5; ++l) direct += sp.coeffs(0, l - 1) * std::sin(2.0 * kPi * l * 0.1);
  CHECK(sp.eval(0.1)(0) == doctest::Approx(direct).epsilon(1e-14));

  // odd symmetry about T/2
  for (double t : {0.05, 0.21, 0.4}) {
    CHECK((sp.eval(sp.T - t) + sp.eval(t)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("random coefficient draws are reproducible and bounded") {
  const auto a = FourierControl::random(6, 5, 5.0, 1.0, 99);
  const auto b = FourierControl::random(6, 5, 5.0, 1.0, 99);
  const auto c = FourierControl::random(6, 5, 5.0, 1.0, 100);
  CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.coeffs - c.coeffs).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.coeffs.cwiseAbs().maxCoeff() <= 5.0);

  const Mat round = matrix_from_json(matrix_to_json(Mat::Identity(2, 2)));
  CHECK(max_abs_diff(round, Mat::Identity(2, 2)) == 0.0);
  const FourierControl back = FourierControl::from_json(a.to_json());
  CHECK((a.coeffs - back.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero controls freeze the core trajectory") {
  FourierControl fc;
  fc.T = 1.0;
  fc.coeffs = Eigen::MatrixXd::Zero(6, 5);
  const auto h = SpinModel::make().h;
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.dense_stride = 100;
  double residual = -1.0;
  const Trajectory traj = integrate_reference(fc, h, cfg, &residual);
  CHECK(residual < 1e-14);
  for (const Mat& s : traj.states) CHECK(max_abs_diff(s, Mat::Identity(4, 4)) < 1e-14);
}

TEST_CASE("spin preset core trajectory is periodic") {
  const auto h = SpinModel::make().h;
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.dense_stride = 1 << 20;
  double residual = -1.0;
  integrate_reference(spin_controls(), h, cfg, &residual);
  CHECK(residual < 1e-5);  // the acceptance suite pins 1e-7 at the production step
}

TEST_CASE("derivative table ground levels") {
  const auto h = SpinModel::make().h;
  const auto table = derivative_table(spin_controls(), h, 3);
  REQUIRE(table.j_max == 3);
  REQUIRE(table.b[0].size() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(max_abs_diff(table.b[0][k], h[k]) < 1e-15);  // B^0_k(0) = H_k
    // sine controls vanish at 0, so the first level collapses
    CHECK(table.b[1][k].norm() < 1e-12);
  }
  for (int j = 0; j <= 3; ++j) {
    for (const Mat& b : table.b[j]) CHECK(is_su_element(b));
  }
}

TEST_CASE("derivative table against the finite-difference oracle") {
  const auto h = SpinModel::make().h;
  const auto fc = spin_controls();
  const auto table = derivative_table(fc, h, 6);
  const auto oracle = test_support::fd_derivative_oracle(fc, h, 3, 1e-3);
  for (int j = 1; j <= 3; ++j) {
    double scale = 1.0;
    for (const Mat& b : table.b[j]) scale = std::max(scale, b.norm());
    for (int k = 0; k < 6; ++k) {
      CHECK((table.b[j][k] - oracle[j][k]).norm() <= 1e-5 * scale);
    }
  }
}

TEST_CASE("two-point oracle at the first level") {
  const auto h = SpinModel::make().h;
  const auto fc = spin_controls();
  const auto rhs = reference_rhs(fc, h);
  const double eps = 1e-4;
  Mat xp = Mat::Identity(4, 4), xm = Mat::Identity(4, 4);
  const int sub = 10;
  for (int s = 0; s < sub; ++s) {
    xp = step_left(xp, s * eps / sub, eps / sub, rhs);
    xm = step_left(xm, -s * eps / sub, -eps / sub, rhs);
  }
  for (int k = 0; k < 6; ++k) {
    const Mat fd = (h[k] * xp - h[k] * xm) / (2.0 * eps) - rhs(0.0, Mat()) * h[k];
    const auto table = derivative_table(fc, h, 1);
    CHECK((fd - table.b[1][k]).norm() < 1e-6);
  }
}

TEST_CASE("regularity of the spin preset") {
  const auto h = SpinModel::make().h;
  const auto rep = regularity_check(spin_controls(), h, 6, 1e-8);
  CHECK(rep.rank == 15);
  CHECK(rep.required == 15);
  CHECK(rep.is_regular);
  CHECK(rep.lie_dim == 15);

  // zero excitation collapses the span to the generators alone
  FourierControl zero;
  zero.T = 1.0;
  zero.coeffs = Eigen::MatrixXd::Zero(6, 5);
  const auto rep0 = regularity_check(zero, h, 6, 1e-8);
  CHECK(rep0.rank == 6);
  CHECK_FALSE(rep0.is_regular);
  CHECK(rep0.to_json().contains("note"));
}

TEST_CASE("regularity rank is monotone in the truncation order") {
  const auto h = SpinModel::make().h;
  int prev = 0;
  for (int jm : {0, 1, 2, 3, 4, 6}) {
    const int rank = regularity_check(spin_controls(), h, jm, 1e-8).rank;
    CHECK(rank >= prev);
    prev = rank;
  }
  CHECK(prev == 15);
}

TEST_CASE("small two-level system reaches full rank with generic controls") {
  const std::vector<Mat> h = {hr_generator(1, 2, 2), hi_generator(1, 2, 2)};
  const auto fc = FourierControl::random(2, 2, 3.0, 1.0, 7);
  const auto rep = regularity_check(fc, h, 4, 1e-8);
  CHECK(rep.required == 3);
  CHECK(rep.rank == 3);
  CHECK(rep.is_regular);
}

TEST_CASE("reference lookup honours the goal translation and the period") {
  const auto h = SpinModel::make().h;
  const Mat goal = cnot_goal();
  const ReferenceTrajectory ref(spin_controls(), h, goal, 1e-3);
  CHECK(max_abs_diff(ref.at(0.0), goal) == 0.0);
  CHECK((ref.at(ref.period()) - goal).norm() <= ref.periodicity_residual() + 1e-12);
  CHECK(max_abs_diff(ref.at(2.5 * ref.period()), ref.at(0.5 * ref.period())) == 0.0);

  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const double t = rng.uniform(0.0, 3.0);
    const Mat x = ref.at(t);
    CHECK(unitarity_error(x) <= kTolUnitary);
    CHECK(det_error(x) <= 1e-8);
  }
}

TEST_CASE("off-grid interpolation stays close to a finer grid") {
  const auto h = SpinModel::make().h;
  const ReferenceTrajectory coarse(spin_controls(), h, Mat::Identity(4, 4), 1e-3);
  const ReferenceTrajectory fine(spin_controls(), h, Mat::Identity(4, 4), 1e-4);
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = rng.uniform(0.0, 1.0);
    CHECK((coarse.at(t) - fine.at(t)).norm() < 1e-7);
  }
}
