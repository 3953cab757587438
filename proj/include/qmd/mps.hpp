#ifndef QMD_MPS_HPP
#define QMD_MPS_HPP

#include <cstdint>
#include <vector>

#include "qmd/channel.hpp"
#include "qmd/opalg.hpp"

namespace qmd {

// Finite tensor train with periodic-boundary amplitudes
//   Psi(i_1,...,i_n) = Tr(A_{i_1}^{[1]} ... A_{i_n}^{[n]}).
// Sites are indexed from 1. Physical dimensions may vary per site (noise
// mixing appends extra tensors); bond dimension is uniform.
class MpsTensorTrain {
 public:
  // Accepts tensors already satisfying sum_i A_i A_i† = I per site (1e-9).
  static MpsTensorTrain from_gauged(std::vector<std::vector<Matrix>> sites);
  // Renormalizes A_i <- S^{-1/2} A_i with S = sum_i A_i A_i†; rejects sites
  // whose S is singular (smallest eigenvalue <= 1e-10).
  static MpsTensorTrain gauge_fix(std::vector<std::vector<Matrix>> raw);

  int bond_dim() const { return bond_dim_; }
  int length() const { return static_cast<int>(sites_.size()); }
  int phys_dim(int k) const { return static_cast<int>(site(k).size()); }
  const std::vector<Matrix>& site(int k) const;  // 1-based
  double gauge_residual(int k) const { return residuals_[k - 1]; }

 private:
  MpsTensorTrain() = default;
  int bond_dim_ = 0;
  std::vector<std::vector<Matrix>> sites_;
  std::vector<double> residuals_;
};

// Transfer map of site k: X -> sum_i A_i† X A_i (Kraus operators A_i†);
// trace preserving by the gauge condition.
KrausChannel site_channel(const MpsTensorTrain& train, int k);

// All m_1*...*m_n amplitudes, lexicographic with i_1 most significant.
// Guarded at 2^20 entries.
std::vector<Complex> amplitudes_bruteforce(const MpsTensorTrain& train, int n);

enum class MpsMethod { bruteforce, transfer };

// <Psi_n|Psi_n> = sum |amplitudes|^2 = superoperator trace of the composed
// site channels over sites 1..n.
double norm_squared(const MpsTensorTrain& train, int n, MpsMethod method);

// Observable on the contiguous window [first, last] (1-based, inclusive) in
// the product basis |i_first ... i_last>.
struct LocalObservable {
  int first = 1;
  int last = 1;
  Matrix matrix;
};

// Superoperator of X-hat: M -> sum_{i,j} <i|X|j> A_i† M A_j with window
// multi-index products A_i = A_{i_first} ... A_{i_last}. Completely positive
// for PSD X; equals the composed site channels for X = I.
Matrix observable_transfer(const MpsTensorTrain& train,
                           const LocalObservable& x);

// <Psi_n|X|Psi_n> / <Psi_n|Psi_n>. Transfer path contracts
// Phi_n .. Phi_{last+1} ∘ X-hat ∘ Phi_{first-1} .. Phi_1.
Complex expectation(const MpsTensorTrain& train, const LocalObservable& x,
                    int n, MpsMethod method);

// Per-site Haar channels (phys_dim Kraus tensors); when beta > 0 each site is
// mixed with full depolarizing noise of weight beta, appending bond_dim^2
// tensors, which certifies Tr(kappa) >= beta for every site channel.
MpsTensorTrain random_gauged_train(int bond_dim, int phys_dim, int n,
                                   std::uint64_t seed, double beta = 0.0);

struct MpsRow {
  int n;
  double phi_n;
  double phi_infty_est;
  double error_bar;
  bool converged;
};

// For n = last(window)..n_max: the finite-chain expectation phi_n, the
// limiting-functional estimate from the tail image of I/d, the certified
// tail-diameter bar 2*prod(1 - kappa_j), and a row-wise convergence flag
// (successive estimates agree within the bar and the bar is below the
// trivial diameter).
std::vector<MpsRow> mps_report(const MpsTensorTrain& train,
                               const LocalObservable& x, int n_max);

struct LimitEstimate {
  double value;
  double error_bar;
  bool converged;
};

// Final row of mps_report.
LimitEstimate limit_state(const MpsTensorTrain& train, const LocalObservable& x,
                          int n_max);

}  // namespace qmd

#endif
