// Bessel functions of the first kind for integer order, used for the
// sideband amplitudes of the frequency-modulated couplings.
#pragma once

namespace esurf {

/// J_n(x) for integer n and real x. Power series for small |x|, Miller's
/// backward recurrence otherwise; absolute accuracy about 1e-13 for |x| < 50.
double bessel_j(int n, double x);

/// Smallest positive x with J_n(x) = target, searched below the first
/// maximum of J_n (n >= 1). Throws NumericalError(invalid_argument) when
/// target is out of reach.
double bessel_j_inverse(int n, double target);

}  // namespace esurf
