#include "qmd/dobrushin.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qmd {

namespace {

constexpr double kGolden = 0.6180339887498949;

// lambda_min(Phi(xi xi*)) evaluated as sum_i (K_i xi)(K_i xi)†.
double lambda_min_image(const std::vector<Matrix>& kraus, const Vector& xi) {
  const int d = static_cast<int>(xi.size());
  Matrix m = Matrix::Zero(d, d);
  for (const auto& k : kraus) {
    Vector w = k * xi;
    m.noalias() += w * w.adjoint();
  }
  if (d == 2) {
    const double p = m(0, 0).real();
    const double q = m(1, 1).real();
    const double h = (p - q) / 2.0;
    return (p + q) / 2.0 - std::sqrt(h * h + std::norm(m(0, 1)));
  }
  if (d == 3) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es;
    es.computeDirect(Eigen::Matrix3cd(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }
  return lambda_min(m);
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Phase-invariant distance sqrt(2 - 2|<xi,eta>|).
double state_distance(const Vector& a, const Vector& b) {
  const double ov = std::abs(a.dot(b));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::min(1.0, ov)));
}

Vector bloch_state(double z, double phi) {
  const double theta = std::acos(std::clamp(z, -1.0, 1.0));
  Vector xi(2);
  xi(0) = std::cos(theta / 2.0);
  xi(1) = std::polar(std::sin(theta / 2.0), phi);
  return xi;
}

// Spherical Fibonacci lattice on the Bloch sphere, sized so the covering
// radius in the state metric stays below eps.
std::vector<Vector> fibonacci_net_d2(double eps, std::size_t budget,
                                     bool* feasible) {
  const double bloch_cover = 4.0 * std::asin(eps / 2.0);
  const double c = 2.8;  // conservative covering constant for the lattice
  const std::size_t n =
      std::max<std::size_t>(64, static_cast<std::size_t>(
                                    std::ceil((c / bloch_cover) * (c / bloch_cover))));
  if (n > budget) {
    *feasible = false;
    return {};
  }
  *feasible = true;
  std::vector<Vector> net;
  net.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / n;
    const double phi = 2.0 * M_PI * std::fmod(kGolden * k, 1.0);
    net.push_back(bloch_state(z, phi));
  }
  return net;
}

// Nearest-neighbor spacing measurement over a probe subset; used to validate
// the net resolution.
double net_probe_spacing(const std::vector<Vector>& net, std::uint64_t seed) {
  CounterRng rng(seed);
  double worst = 0.0;
  const int probes = 64;
  for (int p = 0; p < probes; ++p) {
    const std::size_t i = rng.next_u64() % net.size();
    double best = 1e300;
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (j == i) continue;
      best = std::min(best, state_distance(net[i], net[j]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

const char* md_method_name(MdMethod m) {
  switch (m) {
    case MdMethod::scalar_sampled: return "scalar-sampled";
    case MdMethod::scalar_certified_net: return "scalar-certified-net";
    case MdMethod::analytic: return "analytic";
  }
  return "?";
}

MdEstimate md_scalar_bound(const KrausChannel& ch, int samples, int restarts,
                           std::uint64_t seed) {
  if (ch.mode() == TpCheck::strict && !ch.trace_preserving())
    throw std::invalid_argument("md_scalar_bound: channel is not TP");
  const int d = ch.dim();
  const auto& kraus = ch.kraus();
  auto states = sample_pure_states(d, std::max(1, samples), seed);
  double best = 1e300;
  std::vector<Vector> starts;
  for (const auto& s : states) {
    const double f = lambda_min_image(kraus, s.vec);
    if (f < best) {
      best = f;
      starts.insert(starts.begin(), s.vec);
      if (starts.size() > static_cast<std::size_t>(std::max(1, restarts)))
        starts.pop_back();
    }
  }
  // Projected gradient descent on the sphere with numeric central differences.
  const double h = 1e-6;
  for (auto xi : starts) {
    double step = 0.05;
    double f0 = lambda_min_image(kraus, xi);
    for (int it = 0; it < 60 && step > 1e-9; ++it) {
      Vector grad = Vector::Zero(d);
      for (int c = 0; c < d; ++c) {
        for (int part = 0; part < 2; ++part) {
          const Complex delta = (part == 0) ? Complex(h, 0) : Complex(0, h);
          Vector xp = xi, xm = xi;
          xp(c) += delta;
          xm(c) -= delta;
          xp.normalize();
          xm.normalize();
          const double df =
              (lambda_min_image(kraus, xp) - lambda_min_image(kraus, xm)) /
              (2.0 * h);
          grad(c) += (part == 0) ? Complex(df, 0) : Complex(0, df);
        }
      }
      Vector trial = xi - step * grad;
      if (trial.norm() < 1e-12) {
        step /= 2.0;
        continue;
      }
      trial.normalize();
      const double f1 = lambda_min_image(kraus, trial);
      if (f1 < f0) {
        xi = trial;
        f0 = f1;
      } else {
        step /= 2.0;
      }
    }
    best = std::min(best, f0);
  }
  best = std::max(0.0, best);
  MdEstimate est;
  est.trace_lower_bound = clamp01(d * best);
  est.witness = best * Matrix::Identity(d, d);
  est.method = MdMethod::scalar_sampled;
  est.sample_count = samples;
  est.slack = 0.0;  // heuristic: no certified slack accounting
  return est;
}

std::optional<MdEstimate> md_net_bound(const KrausChannel& ch, double epsilon,
                                       std::size_t point_budget) {
  const int d = ch.dim();
  if (d > 3)
    throw std::invalid_argument("md_net_bound: net certification needs d <= 3");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("md_net_bound: epsilon must lie in (0, 0.5)");
  const auto& kraus = ch.kraus();
  double net_min = 1e300;
  long count = 0;

  if (d == 1) {
    Vector xi(1);
    xi(0) = 1.0;
    net_min = lambda_min_image(kraus, xi);
    count = 1;
  } else if (d == 2) {
    bool feasible = false;
    auto net = fibonacci_net_d2(epsilon, point_budget, &feasible);
    if (!feasible) return std::nullopt;
    const double spacing = net_probe_spacing(net, 12345);
    if (spacing > 2.0 * epsilon)
      throw std::runtime_error("md_net_bound: net spacing validation failed");
    for (const auto& xi : net)
      net_min = std::min(net_min, lambda_min_image(kraus, xi));
    count = static_cast<long>(net.size());
  } else {
    // Product-of-angles grid on CP^2:
    //   xi = (cos t1, sin t1 cos t2 e^{i p1}, sin t1 sin t2 e^{i p2}).
    // Per-parameter steps keep each path segment below eps/4, so the cell
    // displacement in the state metric stays below eps.
    const double q = epsilon / 2.0;  // half-width budget per parameter
    const int n1 = static_cast<int>(std::ceil((M_PI / 2.0) / q));
    // First pass: count points against the budget.
    std::size_t total = 0;
    std::vector<int> n2s(n1);
    for (int i1 = 0; i1 < n1 && total <= point_budget; ++i1) {
      const double s1max =
          std::sin(std::min(M_PI / 2.0, (i1 + 1.0) * (M_PI / 2.0) / n1));
      const int n2 = std::max(
          1, static_cast<int>(std::ceil((M_PI / 2.0) * s1max / q)));
      n2s[i1] = n2;
      for (int i2 = 0; i2 < n2; ++i2) {
        const double lo = i2 * (M_PI / 2.0) / n2;
        const double hi = (i2 + 1.0) * (M_PI / 2.0) / n2;
        const double c2max = std::cos(lo);
        const double s2max = std::sin(hi);
        const std::size_t np1 = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(2.0 * M_PI * s1max * c2max / q)));
        const std::size_t np2 = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(2.0 * M_PI * s1max * s2max / q)));
        total += np1 * np2;
      }
    }
    if (total > point_budget) return std::nullopt;
    for (int i1 = 0; i1 < n1; ++i1) {
      const double t1 = (i1 + 0.5) * (M_PI / 2.0) / n1;
      const double s1max =
          std::sin(std::min(M_PI / 2.0, (i1 + 1.0) * (M_PI / 2.0) / n1));
      const int n2 = n2s[i1];
      for (int i2 = 0; i2 < n2; ++i2) {
        const double t2 = (i2 + 0.5) * (M_PI / 2.0) / n2;
        const double lo = i2 * (M_PI / 2.0) / n2;
        const double hi = (i2 + 1.0) * (M_PI / 2.0) / n2;
        const double c2max = std::cos(lo);
        const double s2max = std::sin(hi);
        const int np1 = std::max(
            1, static_cast<int>(std::ceil(2.0 * M_PI * s1max * c2max / q)));
        const int np2 = std::max(
            1, static_cast<int>(std::ceil(2.0 * M_PI * s1max * s2max / q)));
        const double a0 = std::cos(t1);
        const double a1 = std::sin(t1) * std::cos(t2);
        const double a2 = std::sin(t1) * std::sin(t2);
        Vector xi(3);
        xi(0) = a0;
        for (int j1 = 0; j1 < np1; ++j1) {
          const double p1 = (j1 + 0.5) * 2.0 * M_PI / np1;
          xi(1) = std::polar(a1, p1);
          for (int j2 = 0; j2 < np2; ++j2) {
            const double p2 = (j2 + 0.5) * 2.0 * M_PI / np2;
            xi(2) = std::polar(a2, p2);
            net_min = std::min(net_min, lambda_min_image(kraus, xi));
            ++count;
          }
        }
      }
    }
  }

  MdEstimate est;
  est.trace_lower_bound = clamp01(d * (net_min - 2.0 * epsilon));
  est.method = MdMethod::scalar_certified_net;
  est.sample_count = count;
  est.net_resolution = epsilon;
  est.slack = 2.0 * d * epsilon;
  return est;
}

MdEstimate md_choi_bound(const KrausChannel& ch) {
  const int d = ch.dim();
  MdEstimate est;
  est.trace_lower_bound = clamp01(d * std::max(0.0, lambda_min(choi(ch))));
  est.method = MdMethod::analytic;
  est.sample_count = 0;
  est.slack = 0.0;
  return est;
}

MdEstimate md_certified_bound(const KrausChannel& ch, double epsilon) {
  if (ch.dim() > 3)
    throw std::invalid_argument("md_certified_bound: requires d <= 3");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("md_certified_bound: epsilon out of range");
  MdEstimate best = md_choi_bound(ch);
  if (auto hint = ch.md_trace_hint()) {
    if (*hint > best.trace_lower_bound) {
      best.trace_lower_bound = clamp01(*hint);
      best.method = MdMethod::analytic;
      best.slack = 0.0;
    }
  }
  if (auto net = md_net_bound(ch, epsilon)) {
    if (net->trace_lower_bound > best.trace_lower_bound) best = *net;
  }
  return best;
}

double md_contraction_coefficient(const MdEstimate& est) {
  return clamp01(1.0 - est.trace_lower_bound);
}

double certified_md_trace(const KrausChannel& ch) {
  double b = md_choi_bound(ch).trace_lower_bound;
  if (auto hint = ch.md_trace_hint()) b = std::max(b, clamp01(*hint));
  return b;
}

Matrix md_operator_witness(const KrausChannel& ch, int samples,
                           std::uint64_t seed) {
  const int d = ch.dim();
  auto fit = sample_pure_states(d, std::max(2, samples), seed);
  std::vector<Matrix> images;
  images.reserve(fit.size());
  for (const auto& s : fit)
    images.push_back(ch.apply(Matrix(s.vec * s.vec.adjoint())));
  Matrix b = images.front();
  // Repeated clipping passes: remove the positive part of (b - image) so that
  // b <= image for every fitted sample.
  for (int pass = 0; pass < 4; ++pass) {
    for (const auto& m : images) {
      auto [pos, neg] = jordan_decomposition(Matrix(b - m));
      b -= pos;
    }
  }
  // Verification pass on fresh samples; shrink by the worst violation.
  auto verify = sample_pure_states(d, std::max(2, samples),
                                   CounterRng::mix(seed, 0xbeef));
  double worst = 0.0;
  for (const auto& s : verify) {
    Matrix m = ch.apply(Matrix(s.vec * s.vec.adjoint()));
    worst = std::max(worst, -lambda_min(Matrix(m - b)));
  }
  if (worst > 0.0) b -= (worst + 1e-12) * Matrix::Identity(d, d);
  auto [pos, neg] = jordan_decomposition(Matrix((b + b.adjoint()) / 2.0));
  return pos;
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd rows, double tol)
    : rows_(std::move(rows)) {
  if (rows_.rows() != rows_.cols())
    throw DimensionMismatch("stochastic matrix must be square");
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (rows_.row(i).minCoeff() < -tol)
      throw std::invalid_argument("stochastic matrix has a negative entry");
    if (std::abs(rows_.row(i).sum() - 1.0) > tol)
      throw std::invalid_argument("stochastic matrix row does not sum to 1");
  }
}

double classical_dobrushin(const StochasticMatrix& pi) {
  const auto& p = pi.rows();
  double delta = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = i + 1; j < p.rows(); ++j)
      delta = std::max(delta, 0.5 * (p.row(i) - p.row(j)).cwiseAbs().sum());
  return std::min(1.0, delta);
}

KrausChannel embed_classical(const StochasticMatrix& pi) {
  const int d = pi.dim();
  const auto& p = pi.rows();
  std::vector<Matrix> kraus;
  kraus.reserve(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (p(i, j) <= 0.0) continue;
      Matrix k = Matrix::Zero(d, d);
      k(j, i) = std::sqrt(p(i, j));
      kraus.push_back(std::move(k));
    }
  KrausChannel ch(std::move(kraus));
  // kappa >= diag_j(min_i Pi_ij), the classical Markov-Dobrushin constant.
  double hint = 0.0;
  for (int j = 0; j < d; ++j) hint += p.col(j).minCoeff();
  ch.with_md_trace_hint(std::min(1.0, hint));
  return ch;
}

}  // namespace qmd
