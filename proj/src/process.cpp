#include "qmd/process.hpp"

#include <cmath>
#include <stdexcept>

namespace qmd {

namespace {

Matrix pure_projector(const Vector& xi) { return xi * xi.adjoint(); }

}  // namespace

Eigen::MatrixXd exp1_stochastic(int k) {
  Eigen::MatrixXd m(2, 2);
  if (k % 2 == 0) {
    const int n = k / 2;
    const double a = std::pow(2.0, -static_cast<double>(n));
    m << a, 1.0 - a, a, 1.0 - a;
  } else {
    const int n = (k - 1) / 2;
    const double a = 1.0 / (2.0 * n + 1.0);
    m << 1.0 - a, a, 1.0 - a, a;
  }
  return m;
}

const char* direction_name(Direction d) {
  return d == Direction::forward ? "forward" : "backward";
}

const char* nesting_name(Nesting n) {
  switch (n) {
    case Nesting::nested: return "nested";
    case Nesting::violated: return "violated";
    case Nesting::inconclusive: return "inconclusive";
  }
  return "?";
}

ProcessSchedule ProcessSchedule::explicit_list(
    std::vector<KrausChannel> channels) {
  if (channels.empty())
    throw std::invalid_argument("explicit schedule must be nonempty");
  ProcessSchedule s;
  s.kind_ = Kind::explicit_list;
  s.dim_ = channels.front().dim();
  for (const auto& ch : channels)
    if (ch.dim() != s.dim_)
      throw DimensionMismatch("schedule channels must share one dimension");
  s.channels_ = std::move(channels);
  s.kappa_.resize(s.channels_.size());
  return s;
}

ProcessSchedule ProcessSchedule::periodic(std::vector<KrausChannel> channels) {
  ProcessSchedule s = explicit_list(std::move(channels));
  s.kind_ = Kind::periodic;
  s.period_ = static_cast<int>(s.channels_.size());
  return s;
}

ProcessSchedule ProcessSchedule::generated(int dim, std::string rule,
                                           std::uint64_t seed,
                                           std::map<std::string, double> params) {
  if (rule != "oscillation" && rule != "exp1" && rule != "unitary-depolarizing")
    throw std::invalid_argument("unknown schedule rule: " + rule);
  if ((rule == "oscillation" || rule == "exp1") && dim != 2)
    throw std::invalid_argument(rule + " rule requires dim 2");
  ProcessSchedule s;
  s.kind_ = Kind::generated;
  s.dim_ = dim;
  s.rule_ = std::move(rule);
  s.seed_ = seed;
  s.params_ = std::move(params);
  return s;
}

const KrausChannel& ProcessSchedule::generated_channel(int n) const {
  if (static_cast<std::size_t>(n) >= generated_.size())
    generated_.resize(n + 1);
  auto& slot = generated_[n];
  if (!slot) {
    if (rule_ == "oscillation") {
      Vector e = Vector::Zero(2);
      e(n % 2 == 0 ? 0 : 1) = 1.0;
      slot = std::make_unique<KrausChannel>(
          replace_channel(DensityOperator::pure(e)));
    } else if (rule_ == "exp1") {
      slot = std::make_unique<KrausChannel>(
          embed_classical(StochasticMatrix(exp1_stochastic(n))));
    } else {  // unitary-depolarizing
      double p = 0.5, dep_prob = 0.5;
      if (auto it = params_.find("p"); it != params_.end()) p = it->second;
      if (auto it = params_.find("dep_prob"); it != params_.end())
        dep_prob = it->second;
      CounterRng rng(CounterRng::mix(seed_, static_cast<std::uint64_t>(n)));
      if (rng.uniform() < dep_prob) {
        slot = std::make_unique<KrausChannel>(depolarizing_channel(dim_, p));
      } else {
        slot = std::make_unique<KrausChannel>(
            unitary_channel(haar_random_unitary(dim_, rng)));
      }
    }
  }
  return *slot;
}

const KrausChannel& ProcessSchedule::channel(int n) const {
  if (n < 0) throw std::out_of_range("negative schedule index");
  switch (kind_) {
    case Kind::explicit_list:
      if (n >= length())
        throw std::out_of_range("explicit schedule exhausted at index " +
                                std::to_string(n));
      return channels_[n];
    case Kind::periodic:
      return channels_[n % period_];
    case Kind::generated:
      return generated_channel(n);
  }
  throw std::logic_error("unreachable");
}

double ProcessSchedule::certified_kappa(int n) const {
  int key = n;
  if (kind_ == Kind::periodic) key = n % period_;
  if (static_cast<std::size_t>(key) >= kappa_.size()) kappa_.resize(key + 1);
  auto& slot = kappa_[key];
  if (!slot) slot = certified_md_trace(channel(n));
  return *slot;
}

const Matrix& PrefixCache::prefix(const ProcessSchedule& sched, int n) {
  while (static_cast<int>(prefixes_.size()) <= n) {
    const int k = static_cast<int>(prefixes_.size());
    Matrix step = to_superoperator(sched.channel(k));
    if (k == 0)
      prefixes_.push_back(std::move(step));
    else if (dir_ == Direction::forward)
      prefixes_.push_back(step * prefixes_.back());
    else
      prefixes_.push_back(prefixes_.back() * step);
  }
  return prefixes_[n];
}

const Matrix& forward_prefix(const ProcessSchedule& sched, int n,
                             PrefixCache& cache) {
  if (cache.direction() != Direction::forward)
    throw std::invalid_argument("cache direction is not forward");
  return cache.prefix(sched, n);
}

const Matrix& backward_prefix(const ProcessSchedule& sched, int n,
                              PrefixCache& cache) {
  if (cache.direction() != Direction::backward)
    throw std::invalid_argument("cache direction is not backward");
  return cache.prefix(sched, n);
}

Matrix ergodic_average(const ProcessSchedule& sched, int n,
                       PrefixCache& cache) {
  const int d2 = sched.dim() * sched.dim();
  Matrix acc = Matrix::Zero(d2, d2);
  for (int k = 0; k <= n; ++k) acc += cache.prefix(sched, k);
  return acc / static_cast<double>(n + 1);
}

Matrix ergodic_average(const ProcessSchedule& sched, int n, Direction dir) {
  PrefixCache cache(dir);
  return ergodic_average(sched, n, cache);
}

double diameter_estimate(const Matrix& prefix_superop, int samples,
                         std::uint64_t seed) {
  const int d = static_cast<int>(std::lround(std::sqrt(
      static_cast<double>(prefix_superop.rows()))));
  auto image_tv = [&](const Vector& a, const Vector& b) {
    Matrix diff = pure_projector(a) - pure_projector(b);
    return tv_norm(apply_superoperator(prefix_superop, diff));
  };
  double best = 0.0;
  Vector best_a, best_b;
  // Basis pairs first: exact maximizers for the depolarizing/replace family.
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      Vector a = Vector::Zero(d), b = Vector::Zero(d);
      a(k) = 1.0;
      b(l) = 1.0;
      const double v = image_tv(a, b);
      if (v >= best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  auto states = sample_pure_states(d, 2 * std::max(1, samples), seed);
  for (int i = 0; i + 1 < static_cast<int>(states.size()); i += 2) {
    const double v = image_tv(states[i].vec, states[i + 1].vec);
    if (v > best) {
      best = v;
      best_a = states[i].vec;
      best_b = states[i + 1].vec;
    }
  }
  // Local refinement around the best pair.
  CounterRng rng(CounterRng::mix(seed, 0x5eedul));
  double step = 0.3;
  for (int it = 0; it < 40; ++it) {
    Vector a = (best_a + step * rng.gaussian_vector(d)).normalized();
    Vector b = (best_b + step * rng.gaussian_vector(d)).normalized();
    const double v = image_tv(a, b);
    if (v > best) {
      best = v;
      best_a = a;
      best_b = b;
    } else {
      step *= 0.85;
    }
  }
  return best;
}

ProductBound md_product_bound(const ProcessSchedule& sched, int n,
                              double threshold_r) {
  if (!(threshold_r > 0.0 && threshold_r < 1.0))
    throw std::invalid_argument("threshold_r must lie in (0,1)");
  ProductBound pb{1.0, 0, 1.0 - threshold_r, 2.0};
  for (int j = 0; j <= n; ++j) {
    const double kappa = sched.certified_kappa(j);
    pb.bound *= std::max(0.0, 1.0 - kappa);
    if (kappa >= threshold_r) ++pb.big_n;
  }
  pb.two_mu_pow = 2.0 * std::pow(pb.mu, pb.big_n);
  return pb;
}

PeriodicBound periodic_bound(const ProcessSchedule& sched, int n, int j_star) {
  if (sched.kind() != ProcessSchedule::Kind::periodic)
    throw std::invalid_argument("periodic_bound requires a periodic schedule");
  const int p = sched.period();
  if (j_star < 0) {
    double best = 0.0;
    for (int j = 0; j < p; ++j) {
      const double k = sched.certified_kappa(j);
      if (k > best) {
        best = k;
        j_star = j;
      }
    }
    if (j_star < 0 || best <= 0.0)
      throw std::invalid_argument(
          "periodic_bound: no channel in the period has certified kappa > 0");
  }
  const double kappa = sched.certified_kappa(j_star);
  if (kappa <= 0.0)
    throw std::invalid_argument("periodic_bound: kappa at j_star is not > 0");
  const int s = n % p;
  PeriodicBound out;
  out.j_star = j_star;
  out.mu = std::pow(1.0 - kappa, 1.0 / p);
  out.C = 2.0 * std::pow(1.0 - kappa, -static_cast<double>(s) / p);
  out.value = out.C * std::pow(out.mu, n);
  return out;
}

Nesting nesting_check(const ProcessSchedule& sched, int n, int samples,
                      double tol, int max_iters, std::uint64_t seed) {
  const int d = sched.dim();
  const int d2 = d * d;
  PrefixCache cache(Direction::forward);
  const Matrix sn = cache.prefix(sched, n);
  const Matrix sn1 = cache.prefix(sched, n + 1);

  // Affine system: S_n vec(sigma) = vec(target), Tr sigma = 1.
  Matrix m(d2 + 1, d2);
  m.topRows(d2) = sn;
  m.row(d2).setZero();
  for (int k = 0; k < d; ++k) m(d2, k + k * d) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);

  auto states = sample_pure_states(d, std::max(1, samples), seed);
  bool any_inconclusive = false;
  for (const auto& s : states) {
    const Matrix rho = pure_projector(s.vec);
    const Matrix target = apply_superoperator(sn1, rho);
    Vector b(d2 + 1);
    b.head(d2) = vec(target).col(0);
    b(d2) = 1.0;

    // Dykstra between the affine set and the PSD cone.
    Vector x = vec(rho).col(0);
    Vector pcorr = Vector::Zero(d2);
    double res = 1e300, prev_res = 1e300;
    int stalls = 0;
    for (int it = 0; it < max_iters; ++it) {
      // PSD projection with correction term.
      Matrix h = unvec(Matrix(x + pcorr), d);
      h = (h + h.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      Matrix y = Matrix::Zero(d, d);
      for (int k = 0; k < d; ++k) {
        const double lam = es.eigenvalues()(k);
        if (lam > 0)
          y += lam * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
      }
      Vector yv = vec(y).col(0);
      pcorr = x + pcorr - yv;
      // Affine projection (least squares when the set is empty).
      Vector rhs = m * yv - b;
      x = yv - cod.solve(rhs);

      res = (m * yv - b).norm();
      if (res < tol) break;
      if (it % 50 == 49) {
        if (prev_res - res < 0.01 * prev_res) {
          if (++stalls >= 2) break;
        } else {
          stalls = 0;
        }
        prev_res = res;
      }
    }
    if (res >= tol) {
      if (stalls >= 2 && res > 10.0 * tol) return Nesting::violated;
      any_inconclusive = true;
    }
  }
  return any_inconclusive ? Nesting::inconclusive : Nesting::nested;
}

MixingReport mixing_report(const ProcessSchedule& sched, int n_max,
                           const MixingConfig& cfg) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  MixingReport report;
  for (Direction dir : cfg.directions) {
    PrefixCache cache(dir);
    for (int n = 0; n <= n_max; ++n) {
      MixingRow row;
      row.n = n;
      row.direction = dir;
      row.diameter = diameter_estimate(cache.prefix(sched, n), cfg.samples,
                                       CounterRng::mix(cfg.seed, n));
      const ProductBound pb = md_product_bound(sched, n, cfg.threshold_r);
      row.md_product_bound = pb.bound;
      row.big_n = pb.big_n;
      row.mu = pb.mu;
      row.two_mu_pow_bign = pb.two_mu_pow;
      if (cfg.nesting && dir == Direction::forward)
        row.nesting = nesting_check(sched, n, 4, cfg.nesting_tol,
                                    cfg.nesting_iters, cfg.seed + 1);
      report.rows.push_back(row);
    }
  }
  return report;
}

Trajectory trajectory(const ProcessSchedule& sched, const DensityOperator& rho0,
                      int n_max, Direction dir,
                      std::optional<DensityOperator> reference0) {
  Trajectory out;
  PrefixCache cache(dir);
  Matrix z = reference0 ? reference0->matrix() : rho0.matrix();
  for (int n = 0; n <= n_max; ++n) {
    Matrix state = apply_superoperator(cache.prefix(sched, n), rho0.matrix());
    z = sched.channel(n).apply(z);  // Z_n = Phi_n(Z_{n-1}), Z_{-1} = ref0
    out.states.emplace_back(state, 1e-8);
    out.reference.emplace_back(z, 1e-8);
    out.alignment.push_back(tv_norm(state - z));
  }
  return out;
}

}  // namespace qmd
