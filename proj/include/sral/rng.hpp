#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace sral {

// Deterministic sampling helpers. All randomness in the library and the
// verification suites flows through this class so that a fixed seed yields
// byte-identical runs; raw mt19937_64 output is mapped to doubles by hand
// to avoid distribution implementations that vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Derives an independent stream for a named purpose from a base seed.
  static Rng stream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return Rng(x);
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  std::complex<double> cnormal() { return {normal(), normal()}; }

  // Uniform on the unit circle.
  std::complex<double> phase() {
    double th = 2.0 * M_PI * uniform();
    return {std::cos(th), std::sin(th)};
  }

  Eigen::MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cnormal();
    return a;
  }

  Eigen::MatrixXcd gaussian_real(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = std::complex<double>(normal(), 0.0);
    return a;
  }

  // Haar-like unitary via Gram-Schmidt on a Gaussian matrix.
  Eigen::MatrixXcd unitary(Eigen::Index n) {
    Eigen::MatrixXcd g = gaussian(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
      std::complex<double> d = r(j, j);
      double ad = std::abs(d);
      q.col(j) *= (ad > 0) ? d / ad : 1.0;
    }
    return q;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sral
