#pragma once

#include <span>
#include <vector>

#include "eaclutch/electrostatics.hpp"
#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

struct ContactModel {
    double stiffness_k = 5.39e14;  // N m^-3.5
    double sigma_d = 2.80e-6;      // m

    void validate() const;
};

struct AirProperties {
    double viscosity = kAirViscosity;
};

/// How the Gaussian asperity-gap average is carried out.
struct RoughnessAveraging {
    double truncation_sigmas = 8.0;
    // squeeze-film gaps below this are evaluated at the floor
    double damping_floor = 1e-6;

    void validate() const;
};

/// Greenwood-Williamson load integral of order 3/2 for the standard normal
/// height distribution. Closed form for h >= 0, defining integral for h < 0.
double g_three_halves(double h);

double contact_force(double t_air, const ContactModel& m, double overlap_length, double width);

/// Squeeze-film coefficient of a long flat plate; force is -b * gap velocity.
double squeeze_film_damping_coeff(double t_air, double overlap_length, double width,
                                  const AirProperties& air = {});

/// Mean of b(tau) over the Gaussian gap distribution, the floor applied.
double averaged_damping_coeff(double t_air, const ContactModel& m, double overlap_length, double width,
                              const AirProperties& air = {}, const RoughnessAveraging& avg = {});

double averaged_damping_force(double t_air, double tdot, const ContactModel& m, double overlap_length,
                              double width, const AirProperties& air = {}, const RoughnessAveraging& avg = {});

/// Mean electroadhesive force over the Gaussian gap distribution. Asperities
/// below zero gap are in contact and see the zero-gap force.
double averaged_ea_force(double t_air, const ClutchGeometry& g, double kappa, double v, const ContactModel& m,
                         const RoughnessAveraging& avg = {});

struct CalibrationPoint {
    double normal_force;  // N
    double capacitance;   // F
};

struct ContactFit {
    ContactModel model;
    double se_stiffness_k = 0.0;
    double se_sigma_d = 0.0;
    double residual_norm = 0.0;    // of ln(force) residuals
    bool non_monotone_gaps = false;
    std::vector<double> gaps;      // per input point, from the capacitance
    std::vector<double> predicted_capacitance;  // model curve at each input force
};

/// Gap from capacitance, then fit of contact_force(gap) to the measured loads.
ContactFit fit_contact_model(std::span<const CalibrationPoint> data, const ClutchGeometry& g, double kappa);

}  // namespace eaclutch
