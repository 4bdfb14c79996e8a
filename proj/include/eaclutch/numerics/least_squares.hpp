#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

struct ParamBounds {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct DataPoint {
    double x;
    double y;
};

using ScalarModel = std::function<double(std::span<const double> params, double x)>;
using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

struct FitResult {
    std::vector<double> params;
    std::vector<double> std_errors;  // sqrt(diag(s^2 (J^T J)^-1))
    double residual_norm = 0.0;      // Euclidean norm of the residual vector
    int iterations = 0;
    bool converged = false;
    bool clamped = false;            // a step hit a bound and was projected back
    std::vector<std::string> warnings;
};

/// Levenberg-Marquardt on an arbitrary residual vector of length m.
/// Throws DegenerateFit when the Jacobian is rank deficient at the start or
/// the solution.
FitResult fit_residuals(const ResidualFn& residuals, std::size_t m, std::vector<double> init,
                        std::vector<ParamBounds> bounds, const Tolerance& tol = kPhysicsTolerance);

/// Curve fit y ~ model(params, x) by plain least squares.
FitResult fit_least_squares(const ScalarModel& model, std::span<const DataPoint> data,
                            std::vector<double> init, std::vector<ParamBounds> bounds,
                            const Tolerance& tol = kPhysicsTolerance);

}  // namespace eaclutch
