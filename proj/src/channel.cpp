#include "qmd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace qmd {

namespace {

double tp_defect(const std::vector<Matrix>& kraus, int d) {
  Matrix s = Matrix::Zero(d, d);
  for (const auto& k : kraus) s += k.adjoint() * k;
  return (s - Matrix::Identity(d, d)).norm();
}

}  // namespace

KrausChannel::KrausChannel(std::vector<Matrix> kraus, TpCheck mode)
    : kraus_(std::move(kraus)), mode_(mode) {
  if (kraus_.empty()) throw std::invalid_argument("empty Kraus list");
  dim_ = static_cast<int>(kraus_.front().rows());
  for (const auto& k : kraus_)
    if (k.rows() != dim_ || k.cols() != dim_)
      throw DimensionMismatch("Kraus operators must be square of equal dim");
  if (mode_ == TpCheck::strict && tp_defect(kraus_, dim_) > kTpTol)
    throw std::invalid_argument("channel is not trace preserving");
}

bool KrausChannel::trace_preserving(double tol) const {
  return tp_defect(kraus_, dim_) <= tol;
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw DimensionMismatch("apply: state dimension mismatch");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

DensityOperator KrausChannel::apply(const DensityOperator& rho) const {
  return DensityOperator(apply(rho.matrix()), 1e-9);
}

KrausChannel KrausChannel::dual() const {
  std::vector<Matrix> adj;
  adj.reserve(kraus_.size());
  for (const auto& k : kraus_) adj.push_back(k.adjoint());
  return KrausChannel(std::move(adj), TpCheck::off);
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (outer.dim() != inner.dim())
    throw DimensionMismatch("compose: dimension mismatch");
  const int d = outer.dim();
  std::vector<Matrix> prod;
  prod.reserve(outer.kraus().size() * inner.kraus().size());
  for (const auto& ko : outer.kraus())
    for (const auto& ki : inner.kraus()) prod.push_back(ko * ki);
  TpCheck mode =
      (outer.mode() == TpCheck::strict && inner.mode() == TpCheck::strict)
          ? TpCheck::strict
          : TpCheck::off;
  KrausChannel out(std::move(prod), mode);
  const std::size_t cap = static_cast<std::size_t>(d) * d * d * d;
  if (out.kraus().size() > cap) out = reduce(out);
  return out;
}

Matrix vec(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  Matrix v(d * d, 1);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) v(i + j * d, 0) = a(i, j);
  return v;
}

Matrix unvec(const Matrix& v, int d) {
  Matrix a(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) a(i, j) = v(i + j * d, 0);
  return a;
}

Matrix to_superoperator(const KrausChannel& ch) {
  const int d = ch.dim();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus()) {
    Matrix kc = k.conjugate();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        s.block(i * d, j * d, d, d) += kc(i, j) * k;
  }
  return s;
}

Matrix apply_superoperator(const Matrix& superop, const Matrix& rho) {
  const int d = static_cast<int>(rho.rows());
  return unvec(superop * vec(rho), d);
}

Matrix choi(const KrausChannel& ch) {
  const int d = ch.dim();
  // C = sum_i w_i w_i† with w_i[(k,a)] = (K_i)_{a,k}, index (k,a) = k*d + a.
  Matrix c = Matrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus()) {
    Vector w(d * d);
    for (int col = 0; col < d; ++col)
      for (int a = 0; a < d; ++a) w(col * d + a) = k(a, col);
    c += w * w.adjoint();
  }
  return c;
}

KrausChannel reduce(const KrausChannel& ch) {
  const int d = ch.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(choi(ch));
  std::vector<Matrix> kraus;
  for (int j = 0; j < d * d; ++j) {
    const double lam = es.eigenvalues()(j);
    if (lam < kEigZeroTol) continue;
    Matrix k(d, d);
    const double s = std::sqrt(lam);
    for (int col = 0; col < d; ++col)
      for (int a = 0; a < d; ++a) k(a, col) = s * es.eigenvectors()(col * d + a, j);
    kraus.push_back(std::move(k));
  }
  KrausChannel out(std::move(kraus), TpCheck::off);
  if (auto h = ch.md_trace_hint()) out.with_md_trace_hint(*h);
  return out;
}

double superop_trace(const KrausChannel& ch) {
  const int d = ch.dim();
  double t = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      Matrix e = Matrix::Zero(d, d);
      e(k, l) = 1.0;
      t += ch.apply(e)(k, l).real();
    }
  return t;
}

double superop_trace_kraus(const KrausChannel& ch) {
  double t = 0.0;
  for (const auto& k : ch.kraus()) t += std::norm(k.trace());
  return t;
}

double superop_trace(const Matrix& superop) {
  return superop.trace().real();
}

KrausChannel identity_channel(int d) {
  KrausChannel ch({Matrix::Identity(d, d)});
  ch.with_md_trace_hint(0.0);
  return ch;
}

KrausChannel unitary_channel(const Matrix& u) {
  const int d = static_cast<int>(u.rows());
  if ((u.adjoint() * u - Matrix::Identity(d, d)).norm() > 1e-9)
    throw std::invalid_argument("matrix is not unitary");
  KrausChannel ch({u});
  ch.with_md_trace_hint(0.0);
  return ch;
}

KrausChannel depolarizing_channel(int d, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
  // (1-p) rho + p Tr(rho) I/d via {sqrt(1-p) I} u {sqrt(p/d) |i><j|}.
  std::vector<Matrix> kraus;
  kraus.push_back(std::sqrt(1.0 - p) * Matrix::Identity(d, d));
  const double s = std::sqrt(p / d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = s;
      kraus.push_back(std::move(k));
    }
  KrausChannel ch(std::move(kraus));
  ch.with_md_trace_hint(p);
  return ch;
}

KrausChannel replace_channel(const DensityOperator& sigma) {
  const int d = sigma.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix());
  std::vector<Matrix> kraus;
  for (int k = 0; k < d; ++k) {
    const double lam = std::max(0.0, es.eigenvalues()(k));
    if (lam < kEigZeroTol) continue;
    const double s = std::sqrt(lam);
    for (int j = 0; j < d; ++j) {
      Matrix op = Matrix::Zero(d, d);
      op.col(j) = s * es.eigenvectors().col(k);
      kraus.push_back(std::move(op));
    }
  }
  KrausChannel ch(std::move(kraus));
  ch.with_md_trace_hint(1.0);  // kappa = sigma for a constant-image channel
  return ch;
}

Matrix haar_random_unitary(int d, CounterRng& rng) {
  Matrix g = rng.gaussian_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    Complex diag = r(j, j);
    const double a = std::abs(diag);
    q.col(j) *= (a > 0) ? diag / a : Complex(1.0, 0.0);
  }
  return q;
}

KrausChannel haar_random_channel(int d, int kraus_count, std::uint64_t seed) {
  if (kraus_count < 1) throw std::invalid_argument("kraus_count must be >= 1");
  CounterRng rng(seed);
  Matrix g = rng.gaussian_matrix(d * kraus_count, d);
  // Thin QR: the first d columns of Q form an isometry.
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = Matrix(qr.householderQ()).leftCols(d);
  std::vector<Matrix> kraus;
  kraus.reserve(kraus_count);
  for (int i = 0; i < kraus_count; ++i)
    kraus.push_back(q.block(i * d, 0, d, d));
  return KrausChannel(std::move(kraus));
}

}  // namespace qmd
