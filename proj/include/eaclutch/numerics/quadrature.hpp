#pragma once

#include <functional>
#include <span>

#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

using Integrand = std::function<double(double)>;

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    int evaluations = 0;
};

/// Global adaptive Gauss-Kronrod (7/15) over [a, b]. Either end may be
/// infinite; infinite ranges are mapped onto [0, 1). tol.max_iter caps the
/// number of bisections. Throws NumericalFailure when the error target is
/// not met.
QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                    const Tolerance& tol = kPhysicsTolerance);

/// Same, with interior break points. points must be sorted ascending and
/// hold at least two entries; the ends may be +-infinity.
QuadratureResult integrate_adaptive(const Integrand& f, std::span<const double> points,
                                    const Tolerance& tol = kPhysicsTolerance);

inline double quadrature(const Integrand& f, double a, double b,
                         const Tolerance& tol = kPhysicsTolerance) {
    return integrate_adaptive(f, a, b, tol).value;
}

}  // namespace eaclutch
