#pragma once

#include <limits>
#include <string>
#include <vector>

#include "eaclutch/contact.hpp"
#include "eaclutch/electrostatics.hpp"
#include "eaclutch/polarization.hpp"

namespace eaclutch {

enum class LambdaLaw { unity, fixed, linear };

/// Multiplier on the averaged EA force.
struct LambdaModel {
    LambdaLaw law = LambdaLaw::linear;
    double fixed_value = 1.0;
    double intercept = 2.40;
    double slope = -0.0058;  // 1/V
    // evaluate at |V(t)| instead of the drive amplitude
    bool instantaneous = false;

    void validate() const;
};

struct ClutchConfig {
    ClutchGeometry geometry;
    DielectricModel dielectric;
    ContactModel contact;
    DriveSignal drive;
    AirProperties air;
    RoughnessAveraging averaging;
    LambdaModel lambda;

    // <= 0 means derive from density and dimensions
    double m_d = 0.0;
    double m_s = 0.0;
    double substrate_density = 8500.0;  // brass

    double f_preload = 0.125;
    double mu_d_static = 0.188;
    double mu_d_kinetic = 0.154;
    double mu_base_static = 0.281;
    double mu_base_kinetic = 0.173;
    double gravity = kGravity;

    double engage_threshold = 0.005;   // fraction of the gap traverse
    double release_threshold = 0.9;    // fraction of the load-cell fall
    double hold_time = 1.5;            // s of drive before voltage-off in release runs

    double dielectric_mass() const;
    double substrate_mass() const;
    /// Keeps the dielectric's own thickness in step with the geometry.
    void set_dielectric_thickness(double t);
    void validate() const;
};

struct LoadCellModel {
    double k_lc = 18.0e3;   // N/m
    double b_lc = 0.43;     // kg/s
    double m_lc = 1.10e-3;  // kg
    double check_frequency = 0.0;  // Hz; > 0 enables the resonance check

    double resonance_hz() const;
    void validate() const;
};

enum class Termination {
    none,
    threshold_reached,   // engagement event
    returned_to_zero,    // load cell back at its origin
    motion_ceased,       // stuck for good away from zero
    time_limit,
    failed,
};

const char* to_string(Termination t);

struct SimTrace {
    std::vector<double> t;
    std::vector<double> gap;
    std::vector<double> gap_velocity;
    std::vector<double> shear;
    std::vector<double> voltage;
    std::vector<double> kappa;
    std::vector<double> loadcell_x;  // empty for engagement

    std::size_t size() const { return t.size(); }
};

struct SimResult {
    SimTrace trace;
    double time = std::numeric_limits<double>::quiet_NaN();  // t_engage or t_release
    double time_alt = std::numeric_limits<double>::quiet_NaN();  // release with the other threshold
    Termination reason = Termination::none;
    double initial_gap = 0.0;
    double settled_gap = 0.0;
    double capacity = 0.0;
    std::vector<std::string> warnings;
};

}  // namespace eaclutch
