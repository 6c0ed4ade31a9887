#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "susteer/integrator.hpp"
#include "susteer/runio.hpp"
#include "susteer/spin_model.hpp"
#include "test_support.hpp"

using namespace susteer;
using test_support::max_abs_diff;

namespace {

AlgebraRhs constant_rhs(const Mat& a) {
  return [a](double, const Mat&) { return a; };
}

AlgebraRhs spin_reference_rhs() {
  FourierControl fc;
  fc.T = 1.0;
  fc.coeffs = spin4_table();
  return reference_rhs(fc, SpinModel::make().h);
}

}  // namespace

TEST_CASE("zero field leaves the state alone") {
  Rng rng(2);
  const Mat y = random_su(3, rng);
  const Mat z = Mat::Zero(3, 3);
  CHECK(max_abs_diff(step_left(y, 0.0, 0.1, constant_rhs(z)), y) < 1e-15);
  CHECK(max_abs_diff(step_right(y, 0.0, 0.1, constant_rhs(z)), y) < 1e-15);
}

TEST_CASE("constant generator composes to the exact flow") {
  Rng rng(4);
  Mat a = Mat::Zero(3, 3);
  for (const Mat& b : su_basis(3)) a += 0.3 * rng.normal() * b;
  const Mat y0 = random_su(3, rng);
  const double h = 0.05;
  const int steps = 20;

  for (StepMethod method : {StepMethod::lie_rk4, StepMethod::rk4_project}) {
    Mat yl = y0, yr = y0;
    for (int k = 0; k < steps; ++k) {
      yl = step_left(yl, k * h, h, constant_rhs(a), method);
      yr = step_right(yr, k * h, h, constant_rhs(a), method);
    }
    const Mat flow = expm(Mat(steps * h * a));
    const double tol = method == StepMethod::lie_rk4 ? 1e-12 : 5e-6;  // exact vs O(h^4)
    CHECK((yl - flow * y0).norm() < tol);
    CHECK((yr - y0 * flow).norm() < tol);
  }
}

TEST_CASE("non-skew right-hand sides are rejected") {
  const Mat y = Mat::Identity(2, 2);
  AlgebraRhs bad = [](double, const Mat&) { return Mat(Mat::Identity(2, 2)); };
  CHECK_THROWS_AS(step_left(y, 0.0, 0.1, bad), std::runtime_error);
}

TEST_CASE("order four on the oscillating reference system") {
  const auto rhs = spin_reference_rhs();
  const Mat y0 = Mat::Identity(4, 4);
  auto endpoint = [&](double h, StepMethod m) {
    IntegratorConfig cfg;
    cfg.step = h;
    cfg.method = m;
    cfg.dense_stride = 1 << 20;
    return integrate(y0, 0.0, 1.0, rhs, cfg, Side::left).states.back();
  };
  for (StepMethod m : {StepMethod::lie_rk4, StepMethod::rk4_project}) {
    const Mat truth = endpoint(1.25e-4, m);
    const double e1 = (endpoint(2e-3, m) - truth).norm();
    const double e2 = (endpoint(1e-3, m) - truth).norm();
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
}

TEST_CASE("flow property of the fixed-step march") {
  const auto rhs = spin_reference_rhs();
  const Mat y0 = Mat::Identity(4, 4);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.dense_stride = 1 << 20;
  const Mat direct = integrate(y0, 0.0, 0.8, rhs, cfg, Side::left).states.back();
  const Mat mid = integrate(y0, 0.0, 0.3, rhs, cfg, Side::left).states.back();
  const Mat two = integrate(mid, 0.3, 0.8, rhs, cfg, Side::left).states.back();
  CHECK((direct - two).norm() < 1e-11);
}

TEST_CASE("unitarity holds over long horizons") {
  const auto rhs = spin_reference_rhs();
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.dense_stride = 5000;
  const Trajectory traj = integrate(Mat::Identity(4, 4), 0.0, 100.0, rhs, cfg, Side::left);
  for (const Mat& s : traj.states) {
    CHECK(unitarity_error(s) <= 1e-10);
    CHECK(det_error(s) <= 1e-9);
  }
}

TEST_CASE("dense sampling contract") {
  const auto rhs = spin_reference_rhs();
  const Mat y0 = Mat::Identity(4, 4);

  IntegratorConfig cfg;
  cfg.step = 1e-2;
  cfg.dense_stride = 1;
  const Trajectory t1 = integrate(y0, 0.0, 1.0, rhs, cfg, Side::left);
  cfg.dense_stride = 2;
  const Trajectory t2 = integrate(y0, 0.0, 1.0, rhs, cfg, Side::left);
  CHECK(t1.times.size() - 1 == 2 * (t2.times.size() - 1));
  CHECK(t1.times.back() == 1.0);
  CHECK(t2.times.back() == 1.0);
  CHECK(max_abs_diff(t1.states.back(), t2.states.back()) == 0.0);

  const Trajectory single = integrate(y0, 0.5, 0.5, rhs, cfg, Side::left);
  CHECK(single.times.size() == 1);
  CHECK(max_abs_diff(single.states.front(), y0) == 0.0);

  // a partial final step still ends exactly at t1
  const Trajectory partial = integrate(y0, 0.0, 0.125, rhs, cfg, Side::left);
  CHECK(partial.times.back() == 0.125);
}

TEST_CASE("right-acting march mirrors the left one on transposed data") {
  const auto spin = SpinModel::make();
  FourierControl fc;
  fc.T = 1.0;
  fc.coeffs = spin4_table();
  // W' = W A(t) is solved by the adjoint of the left system with -A(t)^dag = A(t)
  AlgebraRhs rhs = reference_rhs(fc, spin.h);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.dense_stride = 1 << 20;
  const Mat left = integrate(Mat::Identity(4, 4), 0.0, 0.5, rhs, cfg, Side::left).states.back();
  AlgebraRhs flipped = [&rhs](double t, const Mat&) { return Mat(-rhs(t, Mat())); };
  const Mat right = integrate(Mat::Identity(4, 4), 0.0, 0.5, flipped, cfg, Side::right).states.back();
  CHECK((right - left.adjoint()).norm() < 1e-10);
}
