#ifndef QMD_CHANNEL_HPP
#define QMD_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmd/opalg.hpp"
#include "qmd/rng.hpp"

namespace qmd {

inline constexpr double kTpTol = 1e-9;

enum class TpCheck { strict, warn, off };

// Kraus-form map rho -> sum_i K_i rho K_i†. Trace preservation is a
// constructor option: completely positive but non-TP maps (MPS partial
// products, observable maps) are admitted with mode off/warn.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> kraus,
                        TpCheck mode = TpCheck::strict);

  int dim() const { return dim_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  TpCheck mode() const { return mode_; }
  bool trace_preserving(double tol = kTpTol) const;

  Matrix apply(const Matrix& rho) const;
  DensityOperator apply(const DensityOperator& rho) const;

  // Heisenberg-picture dual X -> sum_i K_i† X K_i (unital when TP).
  KrausChannel dual() const;

  // Analytic lower bound on Tr(kappa) supplied by factories that know it;
  // estimators may fold it in.
  std::optional<double> md_trace_hint() const { return md_trace_hint_; }
  KrausChannel& with_md_trace_hint(double v) {
    md_trace_hint_ = v;
    return *this;
  }

 private:
  int dim_;
  std::vector<Matrix> kraus_;
  TpCheck mode_;
  std::optional<double> md_trace_hint_;
};

// Kraus products {K_i L_j}; auto-reduces through the Choi matrix when the
// product count would exceed d^4.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

// Choi-eigendecomposition reduction to at most d^2 Kraus operators.
KrausChannel reduce(const KrausChannel& ch);

// d^2 x d^2 matrix acting on column-major vectorized operators:
// vec(K rho K†) = (conj(K) ⊗ K) vec(rho).
Matrix to_superoperator(const KrausChannel& ch);
Matrix vec(const Matrix& a);
Matrix unvec(const Matrix& v, int d);
Matrix apply_superoperator(const Matrix& superop, const Matrix& rho);

// Unnormalized Choi matrix sum_{kl} |k><l| ⊗ Phi(|k><l|); PSD, trace d for TP.
Matrix choi(const KrausChannel& ch);

// Superoperator trace sum_{kl} <e_k| Phi(e_k e_l*) |e_l> via the basis sum.
double superop_trace(const KrausChannel& ch);
// Same quantity through the identity sum_i |Tr K_i|^2.
double superop_trace_kraus(const KrausChannel& ch);
// Trace of the superoperator matrix (equals the map trace).
double superop_trace(const Matrix& superop);

// Factories. Each sets an analytic md_trace_hint where one is known.
KrausChannel identity_channel(int d);
KrausChannel unitary_channel(const Matrix& u);
KrausChannel depolarizing_channel(int d, double p);
KrausChannel replace_channel(const DensityOperator& sigma);
// Stinespring construction: QR of a (d*kraus_count) x d complex Gaussian.
KrausChannel haar_random_channel(int d, int kraus_count, std::uint64_t seed);

Matrix haar_random_unitary(int d, CounterRng& rng);

}  // namespace qmd

#endif
