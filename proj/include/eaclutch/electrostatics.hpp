#pragma once

#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

struct ClutchGeometry {
    int n_electrodes = 28;
    double electrode_length = 1.5e-3;          // L_e, m
    double electrode_gap = 0.5e-3;             // L_g, m
    double dielectric_thickness = 24e-6;       // T_d, m
    double substrate_overlap_length = 55.5e-3; // L_s, m
    double substrate_width = 2e-3;             // w_s, m
    double substrate_thickness = 2e-3;         // T_s, m

    /// Overlap area of one electrode with the substrate, L_e * w_s.
    double overlap_area() const { return electrode_length * substrate_width; }
    void validate() const;
};

struct FieldSolution {
    double sigma = 0.0;        // C/m^2
    double e_dielectric = 0.0; // V/m
    double e_air = 0.0;        // V/m
    double substrate_potential = 0.0;
};

struct NormalForce {
    double force = 0.0;
    FieldSolution field;
};

struct MaterialElectrical {
    double kappa_s = 54.2;
    double conductivity = 1e-11;
    void validate() const;
};

// Interdigitated co-planar electrodes, floating metal substrate at V/2.
double capacitance_ice(const ClutchGeometry& g, double kappa, double t_air);
double air_gap_from_capacitance(const ClutchGeometry& g, double kappa, double c);
NormalForce ea_normal_force(const ClutchGeometry& g, double kappa, double v, double t_air);
double ea_force_no_airgap(const ClutchGeometry& g, double kappa, double v);

// Parallel plate, substrate at the full potential.
double parallel_plate_capacitance(double area, double kappa, double t_d, double t_air);
double parallel_plate_air_gap(double area, double kappa, double t_d, double c);
double parallel_plate_force(double area, double kappa, double t_d, double t_air, double v);

/// Interfacial (disconnected supply) relaxation time of the dielectric/air stack.
double maxwell_wagner_tau(double sigma_air, double sigma_diel, double kappa, double t_d, double t_air);

}  // namespace eaclutch
