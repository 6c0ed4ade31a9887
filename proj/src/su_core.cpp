#include "susteer/su_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace susteer {

namespace {

constexpr double kPi = std::numbers::pi;

double scale_of(const Mat& a) { return std::max(1.0, a.norm()); }

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": square matrix required");
  }
}

}  // namespace

double frob(const Mat& a) { return a.norm(); }

double fidelity(const Mat& x) {
  require_square(x, "fidelity");
  return x.trace().real();
}

double unitarity_error(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm();
}

double det_error(const Mat& u) { return std::abs(u.determinant() - Complex(1.0, 0.0)); }

double skew_error(const Mat& a) { return (a + a.adjoint()).norm(); }

double trace_error(const Mat& a) { return std::abs(a.trace()); }

bool is_unitary(const Mat& u, double tol_unitary, double tol_det) {
  if (u.rows() != u.cols() || u.rows() == 0 || !u.allFinite()) return false;
  return unitarity_error(u) <= tol_unitary && det_error(u) <= tol_det;
}

bool is_su_element(const Mat& a, double tol_skew, double tol_trace) {
  if (a.rows() != a.cols() || a.rows() == 0 || !a.allFinite()) return false;
  const double s = scale_of(a);
  return skew_error(a) <= tol_skew * s && trace_error(a) <= tol_trace * s;
}

void require_unitary(const Mat& u, const char* what) {
  if (!is_unitary(u)) {
    throw std::invalid_argument(std::string(what) + ": not special-unitary within tolerance (unitarity " +
                                std::to_string(unitarity_error(u)) + ", det " + std::to_string(det_error(u)) + ")");
  }
}

void require_su_element(const Mat& a, const char* what) {
  if (!is_su_element(a)) {
    throw std::invalid_argument(std::string(what) + ": not a traceless skew-Hermitian matrix within tolerance");
  }
}

Mat hr_generator(int i, int j, int n) {
  if (!(1 <= i && i < j && j <= n)) {
    throw std::invalid_argument("hr_generator: indices must satisfy 1 <= i < j <= n");
  }
  Mat h = Mat::Zero(n, n);
  h(i - 1, j - 1) = Complex(1.0, 0.0);
  h(j - 1, i - 1) = Complex(-1.0, 0.0);
  return h;
}

Mat hi_generator(int i, int j, int n) {
  if (!(1 <= i && i < j && j <= n)) {
    throw std::invalid_argument("hi_generator: indices must satisfy 1 <= i < j <= n");
  }
  Mat h = Mat::Zero(n, n);
  h(i - 1, j - 1) = Complex(0.0, 1.0);
  h(j - 1, i - 1) = Complex(0.0, 1.0);
  return h;
}

std::vector<Mat> canonical_diagonals(int n) {
  if (n < 2) throw std::invalid_argument("canonical_diagonals: n >= 2 required");
  std::vector<Mat> out;
  out.reserve(n);
  for (int l = 1; l <= n; ++l) {
    Mat d = Mat::Zero(n, n);
    if (l < n) {
      d(l - 1, l - 1) = Complex(0.0, 1.0);
      d(l, l) = Complex(0.0, -1.0);
    } else {
      d(0, 0) = Complex(0.0, 1.0);
      d(n - 1, n - 1) = Complex(0.0, -1.0);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Mat> su_basis(int n) {
  std::vector<Mat> out;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      out.push_back(hr_generator(i, j, n));
      out.push_back(hi_generator(i, j, n));
    }
  }
  auto diags = canonical_diagonals(n);
  for (int l = 0; l < n - 1; ++l) out.push_back(diags[l]);
  return out;
}

Mat expm(const Mat& a) {
  require_square(a, "expm");
  if (!a.allFinite()) throw std::invalid_argument("expm: non-finite input");
  if (skew_error(a) <= 1e-12 * scale_of(a)) {
    // i*A is Hermitian; exponentiating its eigenphases keeps the result unitary.
    const Mat herm = Complex(0.0, 0.5) * (a - a.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    if (es.info() != Eigen::Success) throw std::runtime_error("expm: Hermitian eigensolver failed");
    Eigen::VectorXcd ph(a.rows());
    for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }
  return a.exp();
}

Mat project_to_unitary(const Mat& a) {
  require_square(a, "project_to_unitary");
  Mat u = a;
  if (unitarity_error(u) > 0.3) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
  }
  const Mat id = Mat::Identity(a.rows(), a.cols());
  for (int it = 0; it < 12; ++it) {
    const Mat g = u.adjoint() * u - id;
    if (g.norm() <= 1e-15 * static_cast<double>(a.rows())) break;
    u -= 0.5 * u * g;  // Newton-Schulz
  }
  return u;
}

Mat normalize_su_phase(const Mat& u) {
  require_square(u, "normalize_su_phase");
  const double theta = std::arg(u.determinant());
  return u * std::polar(1.0, -theta / static_cast<double>(u.rows()));
}

Mat EigenPhases::reconstruct() const {
  Eigen::VectorXcd d(phases.size());
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::polar(1.0, phases(k));
  return basis * d.asDiagonal() * basis.adjoint();
}

EigenPhases unitary_eigenphases(const Mat& w) {
  require_unitary(w, "unitary_eigenphases");
  Eigen::ComplexSchur<Mat> schur(w, true);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("unitary_eigenphases: Schur decomposition did not converge");
  }
  const int n = static_cast<int>(w.rows());
  EigenPhases out;
  out.phases.resize(n);
  // A normal matrix triangularizes to (numerically) diagonal form.
  for (int k = 0; k < n; ++k) out.phases(k) = std::arg(schur.matrixT()(k, k));
  out.basis = schur.matrixU();

  const long q = std::lround(out.phases.sum() / (2.0 * kPi));
  if (q != 0) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return out.phases(a) < out.phases(b); });
    if (q > 0) {
      for (long k = 0; k < q; ++k) out.phases(order[n - 1 - k]) -= 2.0 * kPi;
    } else {
      for (long k = 0; k < -q; ++k) out.phases(order[k]) += 2.0 * kPi;
    }
  }
  out.phases.array() -= out.phases.mean();  // exact zero-sum up to roundoff

  if ((out.reconstruct() - w).norm() > kTolEig * scale_of(w)) {
    throw std::runtime_error("unitary_eigenphases: reconstruction residual above tolerance");
  }
  return out;
}

namespace {

Eigen::MatrixXd flatten_stack(const std::vector<Mat>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("numerical_rank: empty input");
  const Eigen::Index n = vectors.front().rows();
  Eigen::MatrixXd s(static_cast<Eigen::Index>(vectors.size()), 2 * n * n);
  for (size_t r = 0; r < vectors.size(); ++r) {
    const Mat& m = vectors[r];
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument("numerical_rank: inputs must share one square dimension");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        s(static_cast<Eigen::Index>(r), i * n + j) = m(i, j).real();
        s(static_cast<Eigen::Index>(r), n * n + i * n + j) = m(i, j).imag();
      }
    }
    const double nrm = s.row(static_cast<Eigen::Index>(r)).norm();
    if (nrm > 0.0) s.row(static_cast<Eigen::Index>(r)) /= nrm;
  }
  return s;
}

}  // namespace

std::vector<double> span_singular_values(const std::vector<Mat>& vectors) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(flatten_stack(vectors));
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

int numerical_rank(const std::vector<Mat>& vectors, double rel_tol) {
  const auto sv = span_singular_values(vectors);
  if (sv.empty() || sv.front() <= 0.0) return 0;
  int rank = 0;
  for (double s : sv) {
    if (s > rel_tol * sv.front()) ++rank;
  }
  return rank;
}

int lie_closure_dim(const std::vector<Mat>& gens, int n) {
  if (gens.empty()) throw std::invalid_argument("lie_closure_dim: empty generator list");
  for (const Mat& g : gens) {
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument("lie_closure_dim: dimension mismatch");
    require_su_element(g, "lie_closure_dim");
  }
  const int full = n * n - 1;
  std::vector<Mat> basis;

  auto try_add = [&](Mat c) -> bool {
    const double c0 = c.norm();
    if (!(c0 > 1e-10)) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Mat& b : basis) {
        const double ip = (b.adjoint() * c).trace().real();
        c -= ip * b;
      }
    }
    if (c.norm() > 1e-8 * c0) {
      basis.push_back(c / c.norm());
      return true;
    }
    return false;
  };

  for (const Mat& g : gens) try_add(g);

  size_t frontier = 0;
  while (static_cast<int>(basis.size()) < full) {
    const size_t cur = basis.size();
    bool grew = false;
    for (size_t i = 0; i < cur; ++i) {
      for (size_t j = std::max(i + 1, frontier); j < cur; ++j) {
        grew |= try_add(basis[i] * basis[j] - basis[j] * basis[i]);
        if (static_cast<int>(basis.size()) >= full) break;
      }
      if (static_cast<int>(basis.size()) >= full) break;
    }
    if (!grew && basis.size() == cur) break;
    frontier = cur;
  }
  return static_cast<int>(basis.size());
}

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row_re = nlohmann::json::array();
    nlohmann::json row_im = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return {{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Mat matrix_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n) {
    throw std::invalid_argument("matrix_from_json: row count does not match n");
  }
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(re[i].size()) != n || static_cast<int>(im[i].size()) != n) {
      throw std::invalid_argument("matrix_from_json: column count does not match n");
    }
    for (int jj = 0; jj < n; ++jj) {
      m(i, jj) = Complex(re[i][jj].get<double>(), im[i][jj].get<double>());
    }
  }
  return m;
}

double Rng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Mat random_su(int n, Rng& rng) {
  Mat a = Mat::Zero(n, n);
  for (const Mat& b : su_basis(n)) a += rng.normal() * b;
  return expm(a);
}

}  // namespace susteer
