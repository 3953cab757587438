#include <cmath>

#include "doctest.h"
#include "qmd/dobrushin.hpp"
#include "qmd/mps.hpp"
#include "qmd/rng.hpp"

using namespace qmd;

namespace {

// Choi matrix of an arbitrary superoperator on d x d matrices.
Matrix superop_choi(const Matrix& s, int d) {
  Matrix c = Matrix::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      Matrix e = Matrix::Zero(d, d);
      e(k, l) = 1.0;
      Matrix img = apply_superoperator(s, e);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) c(k * d + a, l * d + b) += img(a, b);
    }
  return c;
}

std::vector<std::vector<Matrix>> raw_gaussian_sites(int d, int m, int n,
                                                    std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::vector<Matrix>> sites(n);
  for (auto& site : sites)
    for (int i = 0; i < m; ++i) site.push_back(rng.gaussian_matrix(d, d));
  return sites;
}

}  // namespace

TEST_CASE("gauge_fix: fixed points, scaling, and random residuals") {
  // already gauged: unchanged within 1e-12
  MpsTensorTrain gauged = random_gauged_train(2, 2, 3, 11);
  std::vector<std::vector<Matrix>> copy;
  for (int k = 1; k <= 3; ++k) copy.push_back(gauged.site(k));
  MpsTensorTrain refixed = MpsTensorTrain::gauge_fix(copy);
  for (int k = 1; k <= 3; ++k)
    for (int i = 0; i < 2; ++i)
      CHECK((refixed.site(k)[i] - gauged.site(k)[i]).norm() < 1e-12);

  // A1 = 2I, A2 = 0 rescales to I, 0
  std::vector<std::vector<Matrix>> scaled{
      {2.0 * Matrix::Identity(2, 2), Matrix::Zero(2, 2)}};
  MpsTensorTrain fixed = MpsTensorTrain::gauge_fix(scaled);
  CHECK((fixed.site(1)[0] - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(fixed.site(1)[1].norm() < 1e-12);

  MpsTensorTrain rnd = MpsTensorTrain::gauge_fix(raw_gaussian_sites(2, 3, 4, 5));
  for (int k = 1; k <= 4; ++k) CHECK(rnd.gauge_residual(k) <= 1e-12);

  // singular site rejected with its index
  std::vector<std::vector<Matrix>> singular{{Matrix::Zero(2, 2)}};
  CHECK_THROWS(MpsTensorTrain::gauge_fix(singular));
}

TEST_CASE("site_channel: identity tensors, scalars, TP in general") {
  std::vector<std::vector<Matrix>> idsite{
      {Matrix::Identity(2, 2), Matrix::Zero(2, 2)}};
  // zero tensor breaks no gauge; channel acts as the identity map
  MpsTensorTrain t = MpsTensorTrain::from_gauged(idsite);
  KrausChannel ch = site_channel(t, 1);
  CounterRng rng(1);
  Matrix x = rng.gaussian_matrix(2, 2);
  CHECK((ch.apply(x) - x).norm() < 1e-12);

  // d = 1 scalars with sum |a_i|^2 = 1
  std::vector<std::vector<Matrix>> scal{{Matrix::Constant(1, 1, 0.6),
                                         Matrix::Constant(1, 1, 0.8)}};
  MpsTensorTrain ts = MpsTensorTrain::from_gauged(scal);
  Matrix one = Matrix::Constant(1, 1, 1.0);
  CHECK((site_channel(ts, 1).apply(one) - one).norm() < 1e-12);

  MpsTensorTrain rnd = random_gauged_train(3, 2, 2, 9);
  CHECK(site_channel(rnd, 1).trace_preserving(1e-9));
}

TEST_CASE("amplitudes_bruteforce: scalar chains and single sites") {
  // d = 1: amplitudes are products of the scalars
  std::vector<std::vector<Matrix>> scal;
  const double a[2] = {0.6, 0.8}, b[2] = {1.0 / std::sqrt(2.0),
                                          1.0 / std::sqrt(2.0)};
  scal.push_back({Matrix::Constant(1, 1, a[0]), Matrix::Constant(1, 1, a[1])});
  scal.push_back({Matrix::Constant(1, 1, b[0]), Matrix::Constant(1, 1, b[1])});
  MpsTensorTrain t = MpsTensorTrain::from_gauged(scal);
  auto amps = amplitudes_bruteforce(t, 2);
  REQUIRE(amps.size() == 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(amps[i * 2 + j] - Complex(a[i] * b[j])) < 1e-12);
  CHECK(norm_squared(t, 2, MpsMethod::bruteforce) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // n = 1: amplitudes are the tensor traces
  MpsTensorTrain r = random_gauged_train(2, 3, 1, 21);
  auto a1 = amplitudes_bruteforce(r, 1);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(a1[i] - r.site(1)[i].trace()) < 1e-12);
}

TEST_CASE("norm identity: bruteforce equals transfer") {
  // identity-tensor chain: every amplitude is Tr(I) = d, norm d^2
  std::vector<std::vector<Matrix>> idchain(3,
                                           {std::vector<Matrix>{
                                               Matrix::Identity(2, 2)}});
  MpsTensorTrain ti = MpsTensorTrain::from_gauged(idchain);
  CHECK(norm_squared(ti, 3, MpsMethod::bruteforce) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(norm_squared(ti, 3, MpsMethod::transfer) ==
        doctest::Approx(4.0).epsilon(1e-12));

  for (int t = 0; t < 10; ++t) {
    MpsTensorTrain train = random_gauged_train(2, 2, 6, 500 + t);
    const double bf = norm_squared(train, 6, MpsMethod::bruteforce);
    const double tr = norm_squared(train, 6, MpsMethod::transfer);
    CHECK(bf == doctest::Approx(tr).epsilon(1e-10));
  }
}

TEST_CASE("observable_transfer: identity, matrix units, CP for PSD X") {
  MpsTensorTrain train = random_gauged_train(2, 2, 4, 77);
  LocalObservable ident;
  ident.first = 2;
  ident.last = 3;
  ident.matrix = Matrix::Identity(4, 4);
  Matrix composed = to_superoperator(site_channel(train, 3)) *
                    to_superoperator(site_channel(train, 2));
  CHECK((observable_transfer(train, ident) - composed).norm() < 1e-10);

  LocalObservable unit;
  unit.first = 2;
  unit.last = 2;
  unit.matrix = Matrix::Zero(2, 2);
  unit.matrix(0, 1) = 1.0;  // |0><1| on site 2
  Matrix s = observable_transfer(train, unit);
  CounterRng rng(3);
  Matrix m = rng.gaussian_matrix(2, 2);
  Matrix direct =
      train.site(2)[0].adjoint() * m * train.site(2)[1];
  CHECK((apply_superoperator(s, m) - direct).norm() < 1e-12);

  // PSD observable gives a CP map: Choi PSD
  Matrix g = rng.gaussian_matrix(4, 4);
  LocalObservable psd;
  psd.first = 2;
  psd.last = 3;
  psd.matrix = g * g.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      superop_choi(observable_transfer(train, psd), 2));
  CHECK(es.eigenvalues()(0) > -1e-9);
}

TEST_CASE("expectation: identity, product chains, dual-path agreement") {
  MpsTensorTrain train = random_gauged_train(2, 2, 6, 13);
  LocalObservable ident;
  ident.first = 2;
  ident.last = 3;
  ident.matrix = Matrix::Identity(4, 4);
  CHECK(expectation(train, ident, 6, MpsMethod::transfer).real() ==
        doctest::Approx(1.0).epsilon(1e-10));

  // d = 1 product state: expectation factorizes
  std::vector<std::vector<Matrix>> scal;
  scal.push_back({Matrix::Constant(1, 1, 0.6), Matrix::Constant(1, 1, 0.8)});
  scal.push_back({Matrix::Constant(1, 1, 1.0 / std::sqrt(2.0)),
                  Matrix::Constant(1, 1, Complex(0.0, 1.0 / std::sqrt(2.0)))});
  MpsTensorTrain prod = MpsTensorTrain::from_gauged(scal);
  CounterRng rng(5);
  Matrix g1 = rng.gaussian_matrix(2, 2);
  LocalObservable x1;
  x1.first = 1;
  x1.last = 1;
  x1.matrix = g1 + g1.adjoint();
  Vector psi1(2);
  psi1 << 0.6, 0.8;
  const Complex expect1 = psi1.dot(x1.matrix * psi1);
  CHECK(std::abs(expectation(prod, x1, 2, MpsMethod::bruteforce) - expect1) <
        1e-10);
  CHECK(std::abs(expectation(prod, x1, 2, MpsMethod::transfer) - expect1) <
        1e-10);

  for (int t = 0; t < 8; ++t) {
    MpsTensorTrain r = random_gauged_train(2, 2, 6, 900 + t);
    CounterRng orng(CounterRng::mix(4, t));
    Matrix go = orng.gaussian_matrix(4, 4);
    LocalObservable x;
    x.first = 2;
    x.last = 3;
    x.matrix = go + go.adjoint();
    const Complex bf = expectation(r, x, 6, MpsMethod::bruteforce);
    const Complex tr = expectation(r, x, 6, MpsMethod::transfer);
    CHECK(std::abs(bf - tr) < 1e-9);
    CHECK(std::abs(bf.imag()) < 1e-10);  // Hermitian X: real value
    // positivity of the state functional on X†X
    LocalObservable sq;
    sq.first = 2;
    sq.last = 3;
    sq.matrix = x.matrix.adjoint() * x.matrix;
    CHECK(expectation(r, sq, 6, MpsMethod::transfer).real() >= -1e-9);
  }
}

TEST_CASE("random_gauged_train with beta certifies site kappa >= beta") {
  MpsTensorTrain train = random_gauged_train(2, 4, 5, 31, 0.3);
  for (int k = 1; k <= 5; ++k) {
    CHECK(train.phys_dim(k) == 8);
    CHECK(certified_md_trace(site_channel(train, k)) >= 0.3 - 1e-9);
  }
}

TEST_CASE("limit_state matches the homogeneous fixed point") {
  // every site identical: the tail limit is the site channel's fixed point
  const int d = 2, n = 80;
  KrausChannel base = haar_random_channel(d, d * d, 404);
  std::vector<Matrix> tensors;
  const double beta = 0.3;
  for (const auto& op : base.kraus())
    tensors.push_back(std::sqrt(1.0 - beta) * op.adjoint());
  const double s = std::sqrt(beta / d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Matrix t = Matrix::Zero(d, d);
      t(a, b) = s;
      tensors.push_back(t);
    }
  MpsTensorTrain train =
      MpsTensorTrain::from_gauged(std::vector<std::vector<Matrix>>(n, tensors));

  CounterRng rng(6);
  Matrix g = rng.gaussian_matrix(8, 8);
  LocalObservable x;
  x.first = 1;
  x.last = 1;
  x.matrix = g + g.adjoint();
  x.matrix /= x.matrix.operatorNorm();  // unit observable norm

  // fixed point of the site channel: solve (S - I) vec(rho) = 0, Tr rho = 1
  Matrix sup = to_superoperator(site_channel(train, 1));
  Matrix sys = Matrix::Zero(sup.rows() + 1, sup.cols());
  sys.topRows(sup.rows()) = sup - Matrix::Identity(sup.rows(), sup.cols());
  for (int i = 0; i < d; ++i) sys(sup.rows(), i * d + i) = 1.0;  // trace row
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sup.rows() + 1);
  rhs(sup.rows()) = 1.0;
  Eigen::VectorXcd sol = sys.colPivHouseholderQr().solve(rhs);
  Matrix rho_inf = unvec(Matrix(sol), d);
  rho_inf = (rho_inf + rho_inf.adjoint()) / 2.0;
  rho_inf /= rho_inf.trace();

  const Complex oracle_num =
      apply_superoperator(observable_transfer(train, x), rho_inf).trace();
  LimitEstimate est = limit_state(train, x, n);
  CHECK(est.converged);
  CHECK(est.error_bar < 1e-6);
  CHECK(std::abs(est.value - oracle_num.real()) < 1e-6);

  // phi_n approaches the limit within the certified envelope
  const auto rows = mps_report(train, x, n);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::abs(rows[i].phi_n - rows[i].phi_infty_est) <=
          rows[i].error_bar + 1e-9);
}

TEST_CASE("bruteforce guard rejects oversized enumerations") {
  MpsTensorTrain train = random_gauged_train(2, 4, 12, 55);
  CHECK_THROWS(amplitudes_bruteforce(train, 12));  // 4^12 = 2^24 > 2^20
}
