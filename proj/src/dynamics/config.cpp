#include "eaclutch/dynamics/config.hpp"

#include <cmath>

#include "eaclutch/errors.hpp"

namespace eaclutch {

void LambdaModel::validate() const {
    if (law == LambdaLaw::fixed && !(fixed_value >= 0.0)) throw ConfigError("lambda.fixed_value", "must be >= 0");
    if (law == LambdaLaw::linear && (!std::isfinite(intercept) || !std::isfinite(slope)))
        throw ConfigError("lambda.intercept", "linear law coefficients must be finite");
}

double ClutchConfig::dielectric_mass() const {
    if (m_d > 0.0) return m_d;
    return dielectric.density * geometry.dielectric_thickness * geometry.substrate_overlap_length *
           geometry.substrate_width;
}

double ClutchConfig::substrate_mass() const {
    if (m_s > 0.0) return m_s;
    return substrate_density * geometry.substrate_overlap_length * geometry.substrate_width *
           geometry.substrate_thickness;
}

void ClutchConfig::set_dielectric_thickness(double t) {
    geometry.dielectric_thickness = t;
    dielectric.thickness = t;
}

void ClutchConfig::validate() const {
    geometry.validate();
    dielectric.validate();
    contact.validate();
    drive.validate();
    averaging.validate();
    lambda.validate();
    if (!(air.viscosity > 0.0)) throw ConfigError("air.viscosity", "must be > 0");
    if (std::abs(dielectric.thickness - geometry.dielectric_thickness) > 1e-12 * geometry.dielectric_thickness)
        throw ConfigError("dielectric.thickness", "must equal geometry.dielectric_thickness");
    if (m_d <= 0.0 && !(dielectric.density > 0.0)) throw ConfigError("dielectric.density", "must be > 0");
    if (m_s <= 0.0 && !(substrate_density > 0.0)) throw ConfigError("substrate_density", "must be > 0");
    if (!(f_preload >= 0.0)) throw ConfigError("f_preload", "must be >= 0");
    auto fr = [](const char* name, double v) {
        if (!(v >= 0.0)) throw ConfigError(name, "must be >= 0");
    };
    fr("mu_d_static", mu_d_static);
    fr("mu_d_kinetic", mu_d_kinetic);
    fr("mu_base_static", mu_base_static);
    fr("mu_base_kinetic", mu_base_kinetic);
    if (mu_d_static < mu_d_kinetic) throw ConfigError("mu_d_static", "must be >= mu_d_kinetic");
    if (mu_base_static < mu_base_kinetic) throw ConfigError("mu_base_static", "must be >= mu_base_kinetic");
    if (!(gravity >= 0.0)) throw ConfigError("gravity", "must be >= 0");
    if (!(engage_threshold > 0.0 && engage_threshold < 1.0))
        throw ConfigError("engage_threshold", "must be in (0, 1)");
    if (!(release_threshold > 0.0 && release_threshold < 1.0))
        throw ConfigError("release_threshold", "must be in (0, 1)");
    if (!(hold_time >= 0.0)) throw ConfigError("hold_time", "must be >= 0");
}

double LoadCellModel::resonance_hz() const { return std::sqrt(k_lc / m_lc) / (2.0 * kPi); }

void LoadCellModel::validate() const {
    if (!(k_lc > 0.0)) throw ConfigError("loadcell.k_lc", "must be > 0");
    if (!(b_lc > 0.0)) throw ConfigError("loadcell.b_lc", "must be > 0");
    if (!(m_lc > 0.0)) throw ConfigError("loadcell.m_lc", "must be > 0");
    if (check_frequency > 0.0 && std::abs(resonance_hz() / check_frequency - 1.0) > 0.01)
        throw ConfigError("loadcell.check_frequency", "resonance of k_lc/m_lc differs by more than 1%");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::none: return "none";
        case Termination::threshold_reached: return "threshold_reached";
        case Termination::returned_to_zero: return "returned_to_zero";
        case Termination::motion_ceased: return "motion_ceased";
        case Termination::time_limit: return "time_limit";
        case Termination::failed: return "failed";
    }
    return "unknown";
}

}  // namespace eaclutch
