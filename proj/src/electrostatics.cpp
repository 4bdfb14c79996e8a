#include "eaclutch/electrostatics.hpp"

#include <cmath>
#include <sstream>

#include "eaclutch/errors.hpp"

namespace eaclutch {

namespace {

void require_kappa(double kappa) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw DomainError("relative permittivity must be >= 1");
}

}  // namespace

void ClutchGeometry::validate() const {
    if (n_electrodes < 2 || n_electrodes % 2 != 0)
        throw ConfigError("geometry.n_electrodes", "must be even and >= 2");
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("geometry.") + name, "must be > 0");
    };
    pos(electrode_length, "electrode_length");
    pos(electrode_gap, "electrode_gap");
    pos(dielectric_thickness, "dielectric_thickness");
    pos(substrate_overlap_length, "substrate_overlap_length");
    pos(substrate_width, "substrate_width");
    pos(substrate_thickness, "substrate_thickness");
}

void MaterialElectrical::validate() const {
    if (!(kappa_s >= 1.0)) throw ConfigError("kappa_s", "must be >= 1");
    if (!(conductivity >= 0.0)) throw ConfigError("conductivity", "must be >= 0");
}

double capacitance_ice(const ClutchGeometry& g, double kappa, double t_air) {
    require_kappa(kappa);
    const double den = g.dielectric_thickness + kappa * t_air;
    if (!(den > 0.0)) throw DomainError("capacitance_ice: air gap below -T_d/kappa");
    return g.n_electrodes * kappa * kEpsilon0 * g.overlap_area() / (4.0 * den);
}

double air_gap_from_capacitance(const ClutchGeometry& g, double kappa, double c) {
    require_kappa(kappa);
    if (!(c > 0.0)) throw DomainError("air_gap_from_capacitance: capacitance must be > 0");
    return g.n_electrodes * kEpsilon0 * g.overlap_area() / (4.0 * c) - g.dielectric_thickness / kappa;
}

NormalForce ea_normal_force(const ClutchGeometry& g, double kappa, double v, double t_air) {
    require_kappa(kappa);
    const double td = g.dielectric_thickness;
    const double den = td + kappa * t_air;
    if (!(den > 0.0)) {
        std::ostringstream os;
        os << "ea_normal_force: air gap " << t_air << " m is at or below -T_d/kappa";
        throw DomainError(os.str());
    }
    // series dielectric + air between an electrode and the substrate at V/2
    NormalForce out;
    const double half = 0.5 * v;
    out.field.sigma = half * kappa * kEpsilon0 / den;
    out.field.e_dielectric = out.field.sigma / (kappa * kEpsilon0);
    out.field.e_air = out.field.sigma / kEpsilon0;
    out.field.substrate_potential = half;
    const double na = g.n_electrodes * g.overlap_area();
    out.force = 0.5 * kappa * kappa * kEpsilon0 * na * half * half / (den * den);
    return out;
}

double ea_force_no_airgap(const ClutchGeometry& g, double kappa, double v) {
    require_kappa(kappa);
    const double half = 0.5 * v;
    const double td = g.dielectric_thickness;
    return 0.5 * kappa * kEpsilon0 * g.n_electrodes * g.overlap_area() * half * half / (td * td);
}

double parallel_plate_capacitance(double area, double kappa, double t_d, double t_air) {
    require_kappa(kappa);
    if (!(area > 0.0) || !(t_d > 0.0)) throw DomainError("parallel plate: area and thickness must be > 0");
    const double den = t_d + kappa * t_air;
    if (!(den > 0.0)) throw DomainError("parallel_plate_capacitance: air gap below -T_d/kappa");
    return kappa * kEpsilon0 * area / den;
}

double parallel_plate_air_gap(double area, double kappa, double t_d, double c) {
    require_kappa(kappa);
    if (!(c > 0.0)) throw DomainError("parallel_plate_air_gap: capacitance must be > 0");
    if (!(area > 0.0) || !(t_d > 0.0)) throw DomainError("parallel plate: area and thickness must be > 0");
    // exact inverse of C = kappa eps0 A / (T_d + kappa T)
    return kEpsilon0 * area / c - t_d / kappa;
}

double parallel_plate_force(double area, double kappa, double t_d, double t_air, double v) {
    require_kappa(kappa);
    if (!(area > 0.0) || !(t_d > 0.0)) throw DomainError("parallel plate: area and thickness must be > 0");
    const double den = t_d + kappa * t_air;
    if (!(den > 0.0)) throw DomainError("parallel_plate_force: air gap below -T_d/kappa");
    return 0.5 * kappa * kappa * kEpsilon0 * area * v * v / (den * den);
}

double maxwell_wagner_tau(double sigma_air, double sigma_diel, double kappa, double t_d, double t_air) {
    if (sigma_air < 0.0 || sigma_diel < 0.0) throw DomainError("maxwell_wagner_tau: conductivities must be >= 0");
    const double den = sigma_diel * t_air + sigma_air * t_d;
    if (!(den > 0.0)) throw DomainError("maxwell_wagner_tau: zero conduction path");
    return kEpsilon0 * (kappa * t_air + t_d) / den;
}

}  // namespace eaclutch
