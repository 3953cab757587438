#ifndef QMD_DOBRUSHIN_HPP
#define QMD_DOBRUSHIN_HPP

#include <cstdint>
#include <optional>

#include "qmd/channel.hpp"
#include "qmd/opalg.hpp"

namespace qmd {

enum class MdMethod { scalar_sampled, scalar_certified_net, analytic };

const char* md_method_name(MdMethod m);

// Lower-bound estimate of Tr(kappa_Phi). scalar_sampled is heuristic (it
// approaches the infimum from above); the other two methods are certified.
struct MdEstimate {
  double trace_lower_bound = 0.0;
  std::optional<Matrix> witness;
  MdMethod method = MdMethod::scalar_sampled;
  long sample_count = 0;
  std::optional<double> net_resolution;
  double slack = 0.0;
};

// Haar sampling of lambda_min(Phi(xi xi*)) plus multi-start projected-gradient
// refinement on the unit sphere. Witness is c*I.
MdEstimate md_scalar_bound(const KrausChannel& ch, int samples, int restarts,
                           std::uint64_t seed);

// Epsilon-net evaluation over the pure-state manifold (d <= 3), Lipschitz
// slack 2*eps per point, bound d*(min - 2 eps). Empty when the required net
// exceeds point_budget.
std::optional<MdEstimate> md_net_bound(const KrausChannel& ch, double epsilon,
                                       std::size_t point_budget = 50'000'000);

// d * lambda_min(Choi): certified for any d since product vectors are a
// subset of all unit vectors; exact on depolarizing/replace/unitary families.
MdEstimate md_choi_bound(const KrausChannel& ch);

// Best certified bound available: net (when feasible), Choi spectrum, and any
// factory-supplied analytic hint.
MdEstimate md_certified_bound(const KrausChannel& ch, double epsilon);

// 1 - trace_lower_bound clamped to [0,1].
double md_contraction_coefficient(const MdEstimate& est);

// Fast certified Tr(kappa) lower bound (hint/Choi only) used by schedule-level
// diagnostics.
double certified_md_trace(const KrausChannel& ch);

// Experimental sampled operator-infimum witness: PSD b with
// b <= Phi(xi xi*) for every verification sample. Not used in certified
// bounds.
Matrix md_operator_witness(const KrausChannel& ch, int samples,
                           std::uint64_t seed);

// Right-stochastic matrix (rows sum to one).
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Eigen::MatrixXd rows, double tol = 1e-12);
  int dim() const { return static_cast<int>(rows_.rows()); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// delta(Pi) = 1/2 max_{i,i'} sum_j |Pi_ij - Pi_i'j|.
double classical_dobrushin(const StochasticMatrix& pi);

// Diagonal embedding with Kraus operators sqrt(Pi_ij) |j><i|; maps diag(mu)
// to diag(mu Pi).
KrausChannel embed_classical(const StochasticMatrix& pi);

}  // namespace qmd

#endif
