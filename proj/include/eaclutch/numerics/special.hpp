#pragma once

namespace eaclutch {

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.
/// alpha in (0,1], beta > 0. Negative z is the supported regime; positive z
/// is accepted up to the series radius (|z| <= 5) or exactly for alpha = 1.
/// Throws DomainError outside that, NumericalFailure if the series stalls.
double mittag_leffler(double alpha, double beta, double z);

/// Modified Bessel function of the second kind, real order, x > 0.
/// K_{-nu} = K_nu is enforced by evaluating at |nu|.
double bessel_k(double nu, double x);

}  // namespace eaclutch
