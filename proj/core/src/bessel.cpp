#include "esurf/bessel.hpp"

#include "esurf/common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace esurf {
namespace {

double series(int n, double x) {
  // sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!)
  const double h = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= h / i;
  double sum = term;
  const double h2 = h * h;
  for (int k = 1; k < 200; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double miller(int n, double x) {
  // Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
  // J_0 + 2 sum_k J_{2k} = 1.
  const int start = 2 * ((std::max(n, static_cast<int>(std::abs(x))) + 30) / 2 + 10);
  double next = 0.0, cur = 1e-300, norm = 0.0, wanted = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = 2.0 * k / x * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      wanted *= 1e-250;
    }
    if (k - 1 == n) wanted = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
  }
  norm += cur;  // J_0
  return wanted / norm;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(-n, x);
  if (x < 0.0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_j(n, -x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x < 6.0 || x < 0.5 * n) return series(n, x);
  return miller(n, x);
}

double bessel_j_inverse(int n, double target) {
  if (n < 1) throw NumericalError(ErrorCode::invalid_argument, "inverse needs order n >= 1");
  if (target == 0.0) return 0.0;
  // Locate the first maximum by a coarse scan, then bisect below it.
  double hi = 0.0, best = 0.0;
  for (double x = 0.01; x < n + 10.0; x += 0.01) {
    const double v = bessel_j(n, x);
    if (v < best) break;
    best = v;
    hi = x;
  }
  if (target < 0.0 || target > best) {
    throw NumericalError(ErrorCode::invalid_argument,
                         "J_" + std::to_string(n) + " cannot reach " + std::to_string(target));
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j(n, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace esurf
