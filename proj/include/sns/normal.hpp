#pragma once

namespace sns {

/// Inverse standard normal CDF on (0,1).  Rational initial guess refined
/// by one Halley step of Phi, absolute error well below 1e-9.
double inverse_normal_cdf(double u);

}  // namespace sns
