// Seeded random inputs for the property tests.
#pragma once

#include "esurf/common.hpp"
#include "esurf/models.hpp"

#include <random>

namespace esurf::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx complex_normal() { return {normal(), normal()}; }

  ESPoint es_point(double kappa, double span = 2.0) {
    return {uniform(-span, span), uniform(-span, span), uniform(-span, span), uniform(-span, span),
            kappa};
  }

  MatX matrix(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = complex_normal();
    return m;
  }

  MatX hermitian(int n) {
    const MatX m = matrix(n);
    return 0.5 * (m + m.adjoint());
  }

  MatX unitary(int n) {
    Eigen::HouseholderQR<MatX> qr(matrix(n));
    return qr.householderQ() * MatX::Identity(n, n);
  }

  /// H = K - i G with K Hermitian and G positive semidefinite.
  MatX dissipative(int n, double loss = 1.0) {
    const MatX a = matrix(n);
    return hermitian(n) - cplx(0.0, loss / n) * (a * a.adjoint());
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace esurf::testing
