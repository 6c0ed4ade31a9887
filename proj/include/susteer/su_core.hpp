#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace susteer {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Membership tolerances. Unitarity and determinant residuals are absolute;
// algebra-element residuals are taken relative to max(1, ||A||_F) because the
// iterated-derivative tables produce elements spanning many orders of magnitude.
// All norms are Frobenius.
inline constexpr double kTolUnitary = 1e-9;
inline constexpr double kTolDet = 1e-9;
inline constexpr double kTolSkew = 1e-12;
inline constexpr double kTolTrace = 1e-12;
inline constexpr double kTolEig = 1e-9;

double frob(const Mat& a);

/// Re(tr x): linear, and on SU(n) maximal (value n) exactly at the identity.
double fidelity(const Mat& x);

double unitarity_error(const Mat& u);  // ||U^dag U - I||_F
double det_error(const Mat& u);        // |det U - 1|
double skew_error(const Mat& a);       // ||A + A^dag||_F
double trace_error(const Mat& a);      // |tr A|

bool is_unitary(const Mat& u, double tol_unitary = kTolUnitary, double tol_det = kTolDet);
bool is_su_element(const Mat& a, double tol_skew = kTolSkew, double tol_trace = kTolTrace);
void require_unitary(const Mat& u, const char* what);
void require_su_element(const Mat& a, const char* what);

// Sparse su(n) generator pairs, 1-based indices with 1 <= i < j <= n:
// HR(i,j) has +1 at (i,j) and -1 at (j,i); HI(i,j) has +i at both.
Mat hr_generator(int i, int j, int n);
Mat hi_generator(int i, int j, int n);

// D_1 = diag(i,-i,0,...), D_2 = diag(0,i,-i,0,...), ..., D_n = diag(i,0,...,0,-i).
std::vector<Mat> canonical_diagonals(int n);

// Orthogonal real basis of su(n): every HR/HI pair plus D_1..D_{n-1}.
std::vector<Mat> su_basis(int n);

/// Matrix exponential. Skew-Hermitian inputs take a Hermitian eigensolver
/// route so the result is unitary to machine precision.
Mat expm(const Mat& a);

/// Nearest unitary matrix (polar factor).
Mat project_to_unitary(const Mat& a);

/// u * det(u)^{-1/n}: removes a residual determinant phase.
Mat normalize_su_phase(const Mat& u);

struct EigenPhases {
  Eigen::VectorXd phases;  // zero-sum branch
  Mat basis;               // unitary m with w = m diag(exp(i phases)) m^dag
  Mat reconstruct() const;
};

/// Eigenphases of a special-unitary matrix. Raw phases live in (-pi, pi]; the
/// 2*pi*q surplus forced by det = 1 is removed by shifting the q largest
/// (q > 0) or |q| smallest (q < 0) phases by 2*pi, then the mean is recentred
/// so the stored sum is zero.
EigenPhases unitary_eigenphases(const Mat& w);

/// Rank of the real span of the inputs, flattened to 2n^2 coordinates. Inputs
/// are normalized to unit Frobenius norm first, so the result is invariant
/// under rescaling any one of them.
int numerical_rank(const std::vector<Mat>& vectors, double rel_tol = 1e-8);
std::vector<double> span_singular_values(const std::vector<Mat>& vectors);

/// Dimension of the smallest commutator-closed real subspace containing gens.
int lie_closure_dim(const std::vector<Mat>& gens, int n);

// {"n": .., "re": [[..]], "im": [[..]]}, shared by every module and the CLI.
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

/// Deterministic random source: identical sequences for a fixed seed on every
/// platform (values are mapped from raw engine words by hand).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();

 private:
  std::mt19937_64 gen_;
};

Mat random_su(int n, Rng& rng);

}  // namespace susteer
