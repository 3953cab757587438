#include "qmd/opalg.hpp"

#include <cmath>

#include "qmd/rng.hpp"

namespace qmd {

namespace {

void require_square(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("matrix is not square");
}

double hermiticity_residual(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::SelfAdjointEigenSolver<Matrix> solve_hermitian(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  Matrix h = (b + b.adjoint()) / 2.0;
  es.compute(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return es;
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& a) {
  require_square(a);
  residual_ = hermiticity_residual(a);
  mat_ = (a + a.adjoint()) / 2.0;
}

DensityOperator::DensityOperator(const Matrix& a, double tol)
    : op_(HermitianOperator(a)) {
  if (op_.residual() > 10 * tol)
    throw std::invalid_argument("density operator is not Hermitian");
  const double tr_err = std::abs(op_.matrix().trace().real() - 1.0) +
                        std::abs(op_.matrix().trace().imag());
  if (tr_err > tol)
    throw std::invalid_argument("density operator trace differs from 1");
  if (lambda_min(op_.matrix()) < -tol)
    throw std::invalid_argument("density operator has a negative eigenvalue");
}

DensityOperator DensityOperator::pure(const Vector& xi) {
  const double n = xi.norm();
  if (n < 1e-12) throw std::invalid_argument("zero vector");
  Vector u = xi / n;
  return DensityOperator(u * u.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityOperator DensityOperator::diagonal(const Eigen::VectorXd& weights) {
  Matrix m = Matrix::Zero(weights.size(), weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) m(i, i) = weights(i);
  return DensityOperator(m);
}

std::pair<Matrix, Matrix> hermitian_parts(const Matrix& a) {
  require_square(a);
  const Complex i(0.0, 1.0);
  Matrix re = (a + a.adjoint()) / 2.0;
  Matrix im = (a - a.adjoint()) / (2.0 * i);
  return {re, im};
}

std::pair<Matrix, Matrix> jordan_decomposition(const Matrix& b) {
  require_square(b);
  if (hermiticity_residual(b) > kHermTol)
    throw std::invalid_argument("jordan_decomposition: input is not Hermitian");
  auto es = solve_hermitian(b);
  const auto& evals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const int d = static_cast<int>(b.rows());
  Matrix pos = Matrix::Zero(d, d);
  Matrix neg = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    double lam = evals(k);
    if (std::abs(lam) < kEigZeroTol) continue;
    Matrix proj = vecs.col(k) * vecs.col(k).adjoint();
    if (lam > 0)
      pos += lam * proj;
    else
      neg += (-lam) * proj;
  }
  return {pos, neg};
}

double trace_norm_hermitian(const Matrix& b) {
  auto es = solve_hermitian(b);
  return es.eigenvalues().cwiseAbs().sum();
}

double tv_norm(const Matrix& a) {
  require_square(a);
  auto [re, im] = hermitian_parts(a);
  return trace_norm_hermitian(re) + trace_norm_hermitian(im);
}

double lambda_min(const Matrix& a) {
  require_square(a);
  const int d = static_cast<int>(a.rows());
  if (d == 1) return a(0, 0).real();
  if (d == 2) {
    // Closed form for the hermitized 2x2 matrix.
    const double p = a(0, 0).real();
    const double q = a(1, 1).real();
    const Complex off = (a(0, 1) + std::conj(a(1, 0))) / 2.0;
    const double h = (p - q) / 2.0;
    return (p + q) / 2.0 - std::sqrt(h * h + std::norm(off));
  }
  auto es = solve_hermitian(a);
  return es.eigenvalues()(0);
}

bool op_leq(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("op_leq: dimension mismatch");
  return lambda_min(b - a) >= -tol;
}

std::vector<PureState> sample_pure_states(int d, int count,
                                          std::uint64_t seed) {
  if (d < 1 || count < 1)
    throw std::invalid_argument("sample_pure_states: d and count must be >= 1");
  CounterRng rng(seed);
  std::vector<PureState> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vector v = rng.gaussian_vector(d);
    const double n = v.norm();
    if (n < 1e-8) continue;  // redraw
    out.push_back(PureState{v / n});
  }
  return out;
}

}  // namespace qmd
