#include "qmd/mps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qmd/dobrushin.hpp"

namespace qmd {

namespace {

constexpr std::size_t kBruteforceGuard = std::size_t{1} << 20;

double gauge_defect(const std::vector<Matrix>& tensors, int d) {
  Matrix s = Matrix::Zero(d, d);
  for (const auto& a : tensors) s += a * a.adjoint();
  return (s - Matrix::Identity(d, d)).norm();
}

void check_sites(const std::vector<std::vector<Matrix>>& sites, int& d) {
  if (sites.empty()) throw std::invalid_argument("tensor train must be nonempty");
  if (sites.front().empty())
    throw std::invalid_argument("site 1 has no tensors");
  d = static_cast<int>(sites.front().front().rows());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k].empty())
      throw std::invalid_argument("site " + std::to_string(k + 1) +
                                  " has no tensors");
    for (const auto& a : sites[k])
      if (a.rows() != d || a.cols() != d)
        throw DimensionMismatch("site " + std::to_string(k + 1) +
                                ": tensors must be square of the bond dim");
  }
}

std::size_t state_count(const MpsTensorTrain& train, int n) {
  std::size_t total = 1;
  for (int k = 1; k <= n; ++k) {
    total *= static_cast<std::size_t>(train.phys_dim(k));
    if (total > kBruteforceGuard)
      throw std::invalid_argument("bruteforce guard exceeded (> 2^20 states)");
  }
  return total;
}

void check_prefix(const MpsTensorTrain& train, int n) {
  if (n < 1 || n > train.length())
    throw std::out_of_range("chain length n out of range");
}

void check_window(const MpsTensorTrain& train, const LocalObservable& x) {
  if (x.first < 1 || x.last < x.first || x.last > train.length())
    throw std::out_of_range("observable window out of range");
  std::size_t w = 1, pairs = 1;
  for (int k = x.first; k <= x.last; ++k) {
    w *= static_cast<std::size_t>(train.phys_dim(k));
    pairs = w * w;
    if (pairs > kBruteforceGuard)
      throw std::invalid_argument("observable window too large (m^(2w) guard)");
  }
  if (static_cast<std::size_t>(x.matrix.rows()) != w ||
      static_cast<std::size_t>(x.matrix.cols()) != w)
    throw DimensionMismatch("observable matrix must be " + std::to_string(w) +
                            "x" + std::to_string(w));
}

// Window multi-index -> product A_{i_first} ... A_{i_last}, i_first most
// significant.
std::vector<Matrix> window_products(const MpsTensorTrain& train, int first,
                                    int last) {
  const int d = train.bond_dim();
  std::vector<Matrix> prods{Matrix::Identity(d, d)};
  for (int k = first; k <= last; ++k) {
    std::vector<Matrix> next;
    next.reserve(prods.size() * train.phys_dim(k));
    for (const auto& p : prods)
      for (const auto& a : train.site(k)) next.push_back(p * a);
    prods = std::move(next);
  }
  return prods;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

const std::vector<Matrix>& MpsTensorTrain::site(int k) const {
  if (k < 1 || k > length()) throw std::out_of_range("site index out of range");
  return sites_[k - 1];
}

MpsTensorTrain MpsTensorTrain::from_gauged(
    std::vector<std::vector<Matrix>> sites) {
  MpsTensorTrain t;
  check_sites(sites, t.bond_dim_);
  t.sites_ = std::move(sites);
  for (std::size_t k = 0; k < t.sites_.size(); ++k) {
    const double r = gauge_defect(t.sites_[k], t.bond_dim_);
    if (r > 1e-9)
      throw std::invalid_argument("site " + std::to_string(k + 1) +
                                  " violates the gauge condition");
    t.residuals_.push_back(r);
  }
  return t;
}

MpsTensorTrain MpsTensorTrain::gauge_fix(std::vector<std::vector<Matrix>> raw) {
  MpsTensorTrain t;
  check_sites(raw, t.bond_dim_);
  const int d = t.bond_dim_;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    Matrix s = Matrix::Zero(d, d);
    for (const auto& a : raw[k]) s += a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.eigenvalues()(0) <= 1e-10)
      throw std::invalid_argument("gauge_fix: singular site " +
                                  std::to_string(k + 1));
    Matrix inv_sqrt = es.eigenvectors() *
                      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                      es.eigenvectors().adjoint();
    for (auto& a : raw[k]) a = inv_sqrt * a;
    t.residuals_.push_back(gauge_defect(raw[k], d));
  }
  t.sites_ = std::move(raw);
  return t;
}

KrausChannel site_channel(const MpsTensorTrain& train, int k) {
  std::vector<Matrix> kraus;
  kraus.reserve(train.phys_dim(k));
  for (const auto& a : train.site(k)) kraus.push_back(a.adjoint());
  return KrausChannel(std::move(kraus));
}

std::vector<Complex> amplitudes_bruteforce(const MpsTensorTrain& train, int n) {
  check_prefix(train, n);
  state_count(train, n);
  const int d = train.bond_dim();
  std::vector<Matrix> partial{Matrix::Identity(d, d)};
  for (int k = 1; k <= n; ++k) {
    std::vector<Matrix> next;
    next.reserve(partial.size() * train.phys_dim(k));
    for (const auto& p : partial)
      for (const auto& a : train.site(k)) next.push_back(p * a);
    partial = std::move(next);
  }
  std::vector<Complex> amps(partial.size());
  for (std::size_t i = 0; i < partial.size(); ++i) amps[i] = partial[i].trace();
  return amps;
}

double norm_squared(const MpsTensorTrain& train, int n, MpsMethod method) {
  check_prefix(train, n);
  if (method == MpsMethod::bruteforce) {
    double total = 0.0;
    for (const Complex& a : amplitudes_bruteforce(train, n))
      total += std::norm(a);
    return total;
  }
  const int d2 = train.bond_dim() * train.bond_dim();
  Matrix prod = Matrix::Identity(d2, d2);
  for (int k = 1; k <= n; ++k)
    prod = to_superoperator(site_channel(train, k)) * prod;
  return superop_trace(prod);
}

Matrix observable_transfer(const MpsTensorTrain& train,
                           const LocalObservable& x) {
  check_window(train, x);
  const int d = train.bond_dim();
  const auto prods = window_products(train, x.first, x.last);
  Matrix s = Matrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < prods.size(); ++i)
    for (std::size_t j = 0; j < prods.size(); ++j) {
      const Complex w = x.matrix(static_cast<int>(i), static_cast<int>(j));
      if (w != Complex(0.0, 0.0))
        s += w * kron(prods[j].transpose(), prods[i].adjoint());
    }
  return s;
}

Complex expectation(const MpsTensorTrain& train, const LocalObservable& x,
                    int n, MpsMethod method) {
  check_prefix(train, n);
  check_window(train, x);
  if (x.last > n) throw std::out_of_range("observable window exceeds chain");
  const int d = train.bond_dim();
  if (method == MpsMethod::bruteforce) {
    const auto amps = amplitudes_bruteforce(train, n);
    // Group amplitudes by the indices outside the window; the quadratic form
    // then runs over window indices only.
    std::size_t win = 1;
    for (int k = x.first; k <= x.last; ++k)
      win *= static_cast<std::size_t>(train.phys_dim(k));
    std::size_t suffix = 1;
    for (int k = x.last + 1; k <= n; ++k)
      suffix *= static_cast<std::size_t>(train.phys_dim(k));
    const std::size_t outside = amps.size() / (win * suffix) * suffix;
    Eigen::MatrixXcd grouped(win, outside);
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
      const std::size_t suf = idx % suffix;
      const std::size_t w = (idx / suffix) % win;
      const std::size_t pre = idx / (suffix * win);
      grouped(w, pre * suffix + suf) = amps[idx];
    }
    Complex num = 0.0;
    double den = 0.0;
    for (std::size_t o = 0; o < outside; ++o) {
      const Eigen::VectorXcd v = grouped.col(static_cast<int>(o));
      num += v.dot(x.matrix * v);  // Eigen's dot conjugates the left factor
      den += v.squaredNorm();
    }
    return num / den;
  }
  Matrix head_obs = observable_transfer(train, x);
  Matrix head_norm = Matrix::Identity(d * d, d * d);
  for (int k = 1; k < x.first; ++k) {
    const Matrix s = to_superoperator(site_channel(train, k));
    head_obs = head_obs * s;
    head_norm = s * head_norm;
  }
  for (int k = x.first; k <= x.last; ++k)
    head_norm = to_superoperator(site_channel(train, k)) * head_norm;
  Matrix tail = Matrix::Identity(d * d, d * d);
  for (int k = x.last + 1; k <= n; ++k)
    tail = to_superoperator(site_channel(train, k)) * tail;
  const Complex num = (tail * head_obs).trace();
  const Complex den = (tail * head_norm).trace();
  return num / den;
}

MpsTensorTrain random_gauged_train(int bond_dim, int phys_dim, int n,
                                   std::uint64_t seed, double beta) {
  if (bond_dim < 1 || phys_dim < 1 || n < 1)
    throw std::invalid_argument("random_gauged_train: dims must be positive");
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("beta must lie in [0,1]");
  const int d = bond_dim;
  std::vector<std::vector<Matrix>> sites;
  sites.reserve(n);
  for (int k = 1; k <= n; ++k) {
    KrausChannel ch =
        haar_random_channel(d, phys_dim, CounterRng::mix(seed, k));
    std::vector<Matrix> tensors;
    for (const auto& op : ch.kraus())
      tensors.push_back(std::sqrt(1.0 - beta) * op.adjoint());
    if (beta > 0.0) {
      const double s = std::sqrt(beta / d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          Matrix t = Matrix::Zero(d, d);
          t(a, b) = s;
          tensors.push_back(std::move(t));
        }
    }
    sites.push_back(std::move(tensors));
  }
  return MpsTensorTrain::from_gauged(std::move(sites));
}

std::vector<MpsRow> mps_report(const MpsTensorTrain& train,
                               const LocalObservable& x, int n_max) {
  check_window(train, x);
  if (n_max < x.last || n_max > train.length())
    throw std::out_of_range("n_max must lie in [window end, train length]");
  const int d = train.bond_dim();
  Matrix head_obs = observable_transfer(train, x);
  Matrix head_norm = Matrix::Identity(d * d, d * d);
  for (int k = 1; k < x.first; ++k) {
    const Matrix s = to_superoperator(site_channel(train, k));
    head_obs = head_obs * s;
    head_norm = s * head_norm;
  }
  for (int k = x.first; k <= x.last; ++k)
    head_norm = to_superoperator(site_channel(train, k)) * head_norm;

  Matrix tail = Matrix::Identity(d * d, d * d);
  Matrix rho_tail = DensityOperator::maximally_mixed(d).matrix();
  double bar = 2.0;
  std::vector<MpsRow> rows;
  double prev_est = 0.0;
  for (int n = x.last; n <= n_max; ++n) {
    if (n > x.last) {
      const KrausChannel ch = site_channel(train, n);
      tail = to_superoperator(ch) * tail;
      rho_tail = ch.apply(rho_tail);
      bar *= std::max(0.0, 1.0 - certified_md_trace(ch));
    }
    MpsRow row;
    row.n = n;
    row.phi_n = ((tail * head_obs).trace() / (tail * head_norm).trace()).real();
    const Complex num = apply_superoperator(head_obs, rho_tail).trace();
    const Complex den = apply_superoperator(head_norm, rho_tail).trace();
    row.phi_infty_est = (num / den).real();
    row.error_bar = bar;
    row.converged = n > x.last &&
                    std::abs(row.phi_infty_est - prev_est) <= bar + 1e-12 &&
                    bar < 1.0;
    prev_est = row.phi_infty_est;
    rows.push_back(row);
  }
  return rows;
}

LimitEstimate limit_state(const MpsTensorTrain& train, const LocalObservable& x,
                          int n_max) {
  const auto rows = mps_report(train, x, n_max);
  const MpsRow& last = rows.back();
  return {last.phi_infty_est, last.error_bar, last.converged};
}

}  // namespace qmd
