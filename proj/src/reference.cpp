#include "susteer/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace susteer {

namespace {
constexpr double kPi = std::numbers::pi;

void validate_generators(const std::vector<Mat>& h, const char* what) {
  if (h.empty()) throw std::invalid_argument(std::string(what) + ": empty generator list");
  const Eigen::Index n = h.front().rows();
  for (const Mat& g : h) {
    if (g.rows() != n || g.cols() != n) {
      throw std::invalid_argument(std::string(what) + ": generator dimension mismatch");
    }
    require_su_element(g, what);
  }
}
}  // namespace

Eigen::VectorXd FourierControl::eval(double t) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(controls());
  const double w = 2.0 * kPi / T;
  for (int k = 0; k < controls(); ++k) {
    double s = 0.0;
    for (int l = 0; l < harmonics(); ++l) s += coeffs(k, l) * std::sin(w * (l + 1) * t);
    u(k) = s;
  }
  return u;
}

double FourierControl::eval_one(int k, double t) const {
  const double w = 2.0 * kPi / T;
  double s = 0.0;
  for (int l = 0; l < harmonics(); ++l) s += coeffs(k, l) * std::sin(w * (l + 1) * t);
  return s;
}

double FourierControl::taylor_coeff_at_zero(int k, int p) const {
  if (p % 2 == 0) return 0.0;  // sine series: even derivatives vanish at 0
  const double w = 2.0 * kPi / T;
  const double sign = ((p - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  double s = 0.0;
  for (int l = 0; l < harmonics(); ++l) {
    double pow_fact = 1.0;  // (w*(l+1))^p / p!
    for (int q = 1; q <= p; ++q) pow_fact *= w * (l + 1) / static_cast<double>(q);
    s += coeffs(k, l) * pow_fact;
  }
  return sign * s;
}

FourierControl FourierControl::random(int m, int n_f, double amplitude, double T, std::uint64_t seed) {
  if (m < 1 || n_f < 1 || !(T > 0.0)) throw std::invalid_argument("FourierControl::random: bad shape");
  Rng rng(seed);
  FourierControl fc;
  fc.T = T;
  fc.coeffs.resize(m, n_f);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < n_f; ++l) fc.coeffs(k, l) = rng.uniform(-amplitude, amplitude);
  }
  return fc;
}

nlohmann::json FourierControl::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 0; k < controls(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < harmonics(); ++l) row.push_back(coeffs(k, l));
    rows.push_back(std::move(row));
  }
  return {{"T", T}, {"m", controls()}, {"n_f", harmonics()}, {"coeffs", std::move(rows)}};
}

FourierControl FourierControl::from_json(const nlohmann::json& j) {
  FourierControl fc;
  fc.T = j.at("T").get<double>();
  const int m = j.at("m").get<int>();
  const int n_f = j.at("n_f").get<int>();
  const auto& rows = j.at("coeffs");
  if (static_cast<int>(rows.size()) != m) throw std::invalid_argument("FourierControl: bad coeff rows");
  fc.coeffs.resize(m, n_f);
  for (int k = 0; k < m; ++k) {
    if (static_cast<int>(rows[k].size()) != n_f) throw std::invalid_argument("FourierControl: bad coeff cols");
    for (int l = 0; l < n_f; ++l) fc.coeffs(k, l) = rows[k][l].get<double>();
  }
  if (!(fc.T > 0.0)) throw std::invalid_argument("FourierControl: T > 0 required");
  return fc;
}

MatrixTaylor::MatrixTaylor(int n, int degree) : n_(n) {
  if (n < 1 || degree < 0) throw std::invalid_argument("MatrixTaylor: bad shape");
  c_.assign(degree + 1, Mat::Zero(n, n));
}

MatrixTaylor MatrixTaylor::constant(const Mat& a, int degree) {
  MatrixTaylor t(static_cast<int>(a.rows()), degree);
  t.c_[0] = a;
  return t;
}

MatrixTaylor MatrixTaylor::operator+(const MatrixTaylor& o) const {
  const int d = std::min(degree(), o.degree());
  MatrixTaylor r(n_, d);
  for (int j = 0; j <= d; ++j) r.c_[j] = c_[j] + o.c_[j];
  return r;
}

MatrixTaylor MatrixTaylor::operator-(const MatrixTaylor& o) const {
  const int d = std::min(degree(), o.degree());
  MatrixTaylor r(n_, d);
  for (int j = 0; j <= d; ++j) r.c_[j] = c_[j] - o.c_[j];
  return r;
}

MatrixTaylor MatrixTaylor::operator*(const MatrixTaylor& o) const {
  const int d = std::min(degree(), o.degree());
  MatrixTaylor r(n_, d);
  for (int j = 0; j <= d; ++j) {
    Mat acc = Mat::Zero(n_, n_);
    for (int s = 0; s <= j; ++s) acc += c_[s] * o.c_[j - s];
    r.c_[j] = acc;
  }
  return r;
}

MatrixTaylor MatrixTaylor::derivative() const {
  if (degree() < 1) throw std::runtime_error("MatrixTaylor: degree exhausted by differentiation");
  MatrixTaylor r(n_, degree() - 1);
  for (int j = 0; j + 1 <= degree(); ++j) r.c_[j] = static_cast<double>(j + 1) * c_[j + 1];
  return r;
}

DerivativeTable derivative_table(const FourierControl& fc, const std::vector<Mat>& h, int j_max) {
  validate_generators(h, "derivative_table");
  if (j_max < 0) throw std::invalid_argument("derivative_table: j_max >= 0 required");
  if (fc.controls() != static_cast<int>(h.size())) {
    throw std::invalid_argument("derivative_table: control count does not match generator count");
  }
  const int n = static_cast<int>(h.front().rows());
  const int deg = j_max;

  // A(t) as an exact Taylor polynomial; sine controls contribute odd orders only.
  MatrixTaylor a(n, deg);
  for (int p = 0; p <= deg; ++p) {
    for (size_t k = 0; k < h.size(); ++k) {
      const double c = fc.taylor_coeff_at_zero(static_cast<int>(k), p);
      if (c != 0.0) a.coeff(p) += c * h[k];
    }
  }

  // Core trajectory: X' = A X, X(0) = I, solved term by term.
  MatrixTaylor x(n, deg);
  x.coeff(0) = Mat::Identity(n, n);
  for (int p = 0; p + 1 <= deg; ++p) {
    Mat acc = Mat::Zero(n, n);
    for (int s = 0; s <= p; ++s) acc += a.coeff(s) * x.coeff(p - s);
    x.coeff(p + 1) = acc / static_cast<double>(p + 1);
  }

  DerivativeTable out;
  out.n = n;
  out.m = static_cast<int>(h.size());
  out.j_max = j_max;
  out.b.assign(j_max + 1, std::vector<Mat>());

  for (size_t k = 0; k < h.size(); ++k) {
    MatrixTaylor cur = MatrixTaylor::constant(h[k], deg) * x;  // B^0_k
    out.b[0].push_back(cur.coeff(0));
    for (int j = 1; j <= j_max; ++j) {
      cur = cur.derivative() - (a * cur);
      const Mat& b0 = cur.coeff(0);
      if (!is_su_element(b0, 1e-8, 1e-8)) {
        throw std::runtime_error("derivative_table: recursion left su(n) beyond tolerance");
      }
      out.b[j].push_back(b0);
    }
  }
  return out;
}

nlohmann::json RegularityReport::to_json() const {
  nlohmann::json j = {{"j_max", j_max},         {"rank", rank},
                      {"required", required},   {"singular_values", singular_values},
                      {"is_regular", is_regular}, {"lie_closure_dim", lie_dim}};
  if (!is_regular) {
    j["note"] = "rank below required at this truncation order is inconclusive; retry with larger j_max";
  }
  return j;
}

RegularityReport regularity_check(const FourierControl& fc, const std::vector<Mat>& h, int j_max,
                                  double rank_tol) {
  const DerivativeTable table = derivative_table(fc, h, j_max);
  std::vector<Mat> flat;
  flat.reserve(static_cast<size_t>(table.j_max + 1) * table.m);
  for (const auto& level : table.b) {
    for (const Mat& b : level) flat.push_back(b);
  }
  RegularityReport rep;
  rep.j_max = j_max;
  rep.required = table.n * table.n - 1;
  rep.singular_values = span_singular_values(flat);
  rep.rank = 0;
  if (!rep.singular_values.empty() && rep.singular_values.front() > 0.0) {
    for (double s : rep.singular_values) {
      if (s > rank_tol * rep.singular_values.front()) ++rep.rank;
    }
  }
  rep.is_regular = rep.rank == rep.required;
  rep.lie_dim = lie_closure_dim(h, table.n);
  return rep;
}

AlgebraRhs reference_rhs(const FourierControl& fc, const std::vector<Mat>& h) {
  validate_generators(h, "reference_rhs");
  return [fc, h](double t, const Mat&) -> Mat {
    const Eigen::VectorXd u = fc.eval(t);
    Mat a = Mat::Zero(h.front().rows(), h.front().cols());
    for (size_t k = 0; k < h.size(); ++k) a += u(static_cast<int>(k)) * h[k];
    return a;
  };
}

Trajectory integrate_reference(const FourierControl& fc, const std::vector<Mat>& h,
                               const IntegratorConfig& cfg, double* residual_out) {
  validate_generators(h, "integrate_reference");
  const Eigen::Index n = h.front().rows();
  Trajectory traj = integrate(Mat::Identity(n, n), 0.0, fc.T, reference_rhs(fc, h), cfg, Side::left);
  if (residual_out) {
    *residual_out = (traj.states.back() - Mat::Identity(n, n)).norm();
  }
  return traj;
}

ReferenceTrajectory::ReferenceTrajectory(const FourierControl& fc, const std::vector<Mat>& h,
                                         const Mat& goal, double ref_step, StepMethod method)
    : fc_(fc), goal_(goal) {
  validate_generators(h, "ReferenceTrajectory");
  require_unitary(goal, "ReferenceTrajectory goal");
  if (!(ref_step > 0.0) || !(fc.T > 0.0)) throw std::invalid_argument("ReferenceTrajectory: bad step");
  const long ngrid = std::max(1L, std::lround(fc.T / ref_step));
  grid_step_ = fc.T / static_cast<double>(ngrid);

  IntegratorConfig cfg;
  cfg.step = grid_step_;
  cfg.method = method;
  cfg.dense_stride = 1;
  Trajectory traj = integrate_reference(fc_, h, cfg, &residual_);
  grid_ = std::move(traj.states);
  if (static_cast<long>(grid_.size()) != ngrid + 1) {
    throw std::runtime_error("ReferenceTrajectory: uneven storage grid");
  }
}

Mat ReferenceTrajectory::core_at(double t) const {
  const long ngrid = static_cast<long>(grid_.size()) - 1;
  double u = t / fc_.T;
  u -= std::floor(u);
  const double idx = u * static_cast<double>(ngrid);
  const long i = std::lround(idx);
  if (std::abs(idx - static_cast<double>(i)) < 1e-6) {
    return grid_[static_cast<size_t>(i % ngrid)];
  }
  // Catmull-Rom through four neighbours (periodic wrap), then back to the group.
  const long i0 = static_cast<long>(std::floor(idx));
  const double s = idx - static_cast<double>(i0);
  auto pick = [&](long k) -> const Mat& {
    long w = (k % ngrid + ngrid) % ngrid;
    return grid_[static_cast<size_t>(w)];
  };
  const Mat& p0 = pick(i0 - 1);
  const Mat& p1 = pick(i0);
  const Mat& p2 = pick(i0 + 1);
  const Mat& p3 = pick(i0 + 2);
  const Mat c = 0.5 * ((2.0 * p1) + (-p0 + p2) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (s * s) +
                       (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * (s * s * s));
  return normalize_su_phase(project_to_unitary(c));
}

Mat ReferenceTrajectory::at(double t) const { return core_at(t) * goal_; }

}  // namespace susteer
