#ifndef QMD_PROCESS_HPP
#define QMD_PROCESS_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qmd/channel.hpp"
#include "qmd/dobrushin.hpp"
#include "qmd/opalg.hpp"

namespace qmd {

enum class Direction { forward, backward };
const char* direction_name(Direction d);

// Alternating classical pair of the binary-state example: index 2n has both
// rows (2^{-n}, 1-2^{-n}); index 2n+1 has both rows (1-1/(2n+1), 1/(2n+1)).
Eigen::MatrixXd exp1_stochastic(int k);

// Rule yielding the channel Phi_n at each time index. Generated rules are
// deterministic functions of (seed, n):
//   "oscillation"          replace |0><0| at even n, |1><1| at odd n (d=2)
//   "exp1"                 diagonal embedding of the alternating classical pair
//   "unitary-depolarizing" Bernoulli(dep_prob) depolarizing(p), else Haar unitary
class ProcessSchedule {
 public:
  enum class Kind { explicit_list, periodic, generated };

  static ProcessSchedule explicit_list(std::vector<KrausChannel> channels);
  static ProcessSchedule periodic(std::vector<KrausChannel> channels);
  static ProcessSchedule generated(int dim, std::string rule,
                                   std::uint64_t seed,
                                   std::map<std::string, double> params = {});

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Explicit schedules are finite; periodic/generated are unbounded.
  bool bounded() const { return kind_ == Kind::explicit_list; }
  int length() const { return static_cast<int>(channels_.size()); }
  int period() const { return period_; }

  const KrausChannel& channel(int n) const;
  // Cached certified Tr(kappa) lower bound for channel n.
  double certified_kappa(int n) const;

 private:
  ProcessSchedule() = default;
  const KrausChannel& generated_channel(int n) const;

  Kind kind_ = Kind::explicit_list;
  int dim_ = 0;
  int period_ = 0;
  std::vector<KrausChannel> channels_;
  std::string rule_;
  std::uint64_t seed_ = 0;
  std::map<std::string, double> params_;
  mutable std::vector<std::unique_ptr<KrausChannel>> generated_;
  mutable std::vector<std::optional<double>> kappa_;
};

// Memoized superoperators of the prefix compositions
//   forward:  Phi_n ∘ ... ∘ Phi_0
//   backward: Phi_0 ∘ ... ∘ Phi_n
// Entries live in a deque so returned references stay valid while the cache
// grows.
class PrefixCache {
 public:
  explicit PrefixCache(Direction dir) : dir_(dir) {}
  Direction direction() const { return dir_; }
  const Matrix& prefix(const ProcessSchedule& sched, int n);

 private:
  Direction dir_;
  std::deque<Matrix> prefixes_;
};

const Matrix& forward_prefix(const ProcessSchedule& sched, int n,
                             PrefixCache& cache);
const Matrix& backward_prefix(const ProcessSchedule& sched, int n,
                              PrefixCache& cache);

// Cesaro mean (1/(n+1)) sum_{k=0}^{n} Phi_{0,k}.
Matrix ergodic_average(const ProcessSchedule& sched, int n, Direction dir);
Matrix ergodic_average(const ProcessSchedule& sched, int n, PrefixCache& cache);

// Max TV distance between images of sampled pure-state pairs (basis pairs
// always included) with local refinement.
double diameter_estimate(const Matrix& prefix_superop, int samples,
                         std::uint64_t seed);

struct ProductBound {
  double bound;       // prod_{j<=n} (1 - Tr kappa_j)
  int big_n;          // #{j <= n : Tr kappa_j >= r}
  double mu;          // 1 - r
  double two_mu_pow;  // 2 mu^{N(n)}
};
ProductBound md_product_bound(const ProcessSchedule& sched, int n,
                              double threshold_r);

struct PeriodicBound {
  double C;
  double mu;
  double value;  // C * mu^n
  int j_star;
};
// Corollary-style envelope for periodic schedules; j_star < 0 selects the
// period index with the largest certified kappa.
PeriodicBound periodic_bound(const ProcessSchedule& sched, int n,
                             int j_star = -1);

enum class Nesting { nested, violated, inconclusive };
const char* nesting_name(Nesting n);

// Tests image nesting of forward prefixes on sampled states by Dykstra
// alternating projection between {sigma : Phi_{0,n}(sigma) = target, Tr = 1}
// and the PSD cone.
Nesting nesting_check(const ProcessSchedule& sched, int n, int samples,
                      double tol, int max_iters, std::uint64_t seed = 7);

struct MixingRow {
  int n;
  Direction direction;
  double diameter;
  double md_product_bound;
  int big_n;
  double mu;
  double two_mu_pow_bign;
  std::optional<Nesting> nesting;
};

struct MixingReport {
  std::vector<MixingRow> rows;
};

struct MixingConfig {
  int samples = 256;
  std::uint64_t seed = 0;
  double threshold_r = 0.5;
  bool nesting = false;
  double nesting_tol = 1e-6;
  int nesting_iters = 2000;
  std::vector<Direction> directions = {Direction::forward, Direction::backward};
};

MixingReport mixing_report(const ProcessSchedule& sched, int n_max,
                           const MixingConfig& cfg);

struct Trajectory {
  std::vector<DensityOperator> states;     // prefix images of rho0
  std::vector<DensityOperator> reference;  // Z_0 = ref0, Z_n = Phi_n(Z_{n-1})
  std::vector<double> alignment;           // tv(states[n] - reference[n])
};

Trajectory trajectory(const ProcessSchedule& sched, const DensityOperator& rho0,
                      int n_max, Direction dir,
                      std::optional<DensityOperator> reference0 = std::nullopt);

}  // namespace qmd

#endif
