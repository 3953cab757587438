#ifndef QMD_RNG_HPP
#define QMD_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qmd {

// Counter-based generator: the k-th output is splitmix64 applied to
// seed + k * golden-ratio increment. Bit-exact on every platform, and a
// stream can be split by deriving a child seed from (seed, index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return scramble(a ^ (0x9e3779b97f4a7c15ull + b + (a << 6) + (a >> 2)));
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ull;
    return scramble(seed_ ^ counter_);
  }

  // Uniform on [0,1) with 53 bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Box-Muller; draws are paired internally.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  Eigen::VectorXcd gaussian_vector(int d) {
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = gaussian_complex();
    return v;
  }

  Eigen::MatrixXcd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXcd g(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) g(i, j) = gaussian_complex();
    return g;
  }

 private:
  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qmd

#endif
