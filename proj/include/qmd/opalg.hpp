#ifndef QMD_OPALG_HPP
#define QMD_OPALG_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qmd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEigZeroTol = 1e-12;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Self-adjoint operator. Construction symmetrizes (a + a†)/2 and records the
// hermiticity residual, keeping eigen-solvers on the self-adjoint path.
class HermitianOperator {
 public:
  explicit HermitianOperator(const Matrix& a);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  double residual() const { return residual_; }

 private:
  Matrix mat_;
  double residual_;
};

// Trace-one positive semidefinite state rho.
class DensityOperator {
 public:
  explicit DensityOperator(const Matrix& a, double tol = kPsdTol);

  static DensityOperator pure(const Vector& xi);
  static DensityOperator maximally_mixed(int d);
  static DensityOperator diagonal(const Eigen::VectorXd& weights);

  int dim() const { return op_.dim(); }
  const Matrix& matrix() const { return op_.matrix(); }

 private:
  explicit DensityOperator(HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

struct PureState {
  Vector vec;  // unit norm within 1e-12
};

// (Re(a), Im(a)) with a = Re(a) + i Im(a); both parts Hermitian.
std::pair<Matrix, Matrix> hermitian_parts(const Matrix& a);

// b = pos - neg with pos, neg PSD of disjoint support. Eigenvalues with
// |lambda| < kEigZeroTol are treated as zero.
std::pair<Matrix, Matrix> jordan_decomposition(const Matrix& b);

// ||a||_TV = Tr(Re(a)_+ + Re(a)_-) + Tr(Im(a)_+ + Im(a)_-).
double tv_norm(const Matrix& a);

// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm_hermitian(const Matrix& b);

// Smallest eigenvalue of the hermitized matrix.
double lambda_min(const Matrix& a);

// a <= b in the PSD order: lambda_min(b - a) >= -tol.
bool op_leq(const Matrix& a, const Matrix& b, double tol);

// Haar-distributed unit vectors (Gaussian then normalize); deterministic per
// seed, near-zero draws are rejected and redrawn.
std::vector<PureState> sample_pure_states(int d, int count, std::uint64_t seed);

}  // namespace qmd

#endif
