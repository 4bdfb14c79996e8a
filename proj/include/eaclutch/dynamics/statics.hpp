#pragma once

#include <array>

#include "eaclutch/dynamics/config.hpp"

namespace eaclutch {

double lambda_ea(double v, const LambdaModel& law);

/// Every force acting on the dielectric at one instant (N, signed as in the
/// equation of motion: contact and damping push the gap open).
struct GapForces {
    double contact = 0.0;       // F_k
    double damping = 0.0;       // F_b', = -b' * gap velocity
    double ea = 0.0;            // averaged EA force without lambda
    double lambda = 1.0;
    double normal_base = 0.0;   // floored at zero
    bool lifted_off = false;    // base normal force would be negative
    double acceleration = 0.0;  // gap acceleration
};

GapForces gap_forces(const ClutchConfig& c, double t_air, double tdot, double kappa, double v);

/// Right-hand side of the gap equation with the drive staying on (polarization
/// evaluated directly, no table). Returns (gap velocity, gap acceleration).
std::array<double, 2> gap_dynamics_rhs(std::array<double, 2> state, double t, const ClutchConfig& c);

/// Static balance F_k = lambda F_ea' + m_d g + F_preload at saturated
/// polarization. v = 0 finds the unloaded gap by bracketing; v > 0 follows
/// the root down from from_gap (pass NaN to start at the v = 0 gap).
double equilibrium_gap(const ClutchConfig& c, double v, double from_gap = std::numeric_limits<double>::quiet_NaN());

/// Friction on the substrate for a given base normal force and contact force.
double shear_force(const ClutchConfig& c, double normal_base, double contact, bool moving);
double shear_capacity(const ClutchConfig& c, double t_air_settled);

struct PreloadEstimate {
    double value = 0.0;
    bool clamped = false;
};
PreloadEstimate preload_from_baseline(double f_shear_v0, const ClutchConfig& c);

}  // namespace eaclutch
