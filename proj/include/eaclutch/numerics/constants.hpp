#pragma once

#include <numbers>

namespace eaclutch {

inline constexpr double kEpsilon0 = 8.854e-12;   // F/m
inline constexpr double kGravity = 9.81;          // m/s^2
inline constexpr double kAirViscosity = 1.85e-5;  // N s/m^2
inline constexpr double kPi = std::numbers::pi;

struct Tolerance {
    double rel = 1e-8;
    double abs = 1e-12;
    int max_iter = 200;

    void validate() const;
};

/// Defaults used by the physics modules.
inline constexpr Tolerance kPhysicsTolerance{1e-8, 1e-12, 200};
/// Quadratures inside force kernels; these are called per ODE stage so they
/// run a bit looser than the ODE itself.
inline constexpr Tolerance kKernelTolerance{1e-10, 1e-30, 400};
/// Special-function target accuracy.
inline constexpr double kSpecialRelTol = 1e-12;

}  // namespace eaclutch
