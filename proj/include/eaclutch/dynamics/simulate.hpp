#pragma once

#include <limits>
#include <memory>

#include "eaclutch/dynamics/config.hpp"
#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

struct SimOptions {
    double t_max = std::numeric_limits<double>::quiet_NaN();  // NaN: 2 ms engage, 0.5 s release
    Tolerance tol = kPhysicsTolerance;
    bool record_trace = true;
    // Shared relaxation table; built (and cached per alpha) when empty.
    std::shared_ptr<const RelaxationKernel> kernel;
};

/// Process-wide cache of relaxation tables keyed by alpha. Thread-safe.
std::shared_ptr<const RelaxationKernel> relaxation_kernel_for(double alpha);

/// Gap closure from the unloaded equilibrium with the drive switched on at
/// t = 0. time = instant the gap has covered engage_threshold of the way to
/// its saturated equilibrium.
SimResult simulate_engagement(const ClutchConfig& c, const SimOptions& opt = {});

/// Voltage-off at t = 0 after hold_time of drive, with the substrate held by
/// the load cell at force_ratio of the predicted capacity. time = first
/// instant the load-cell force has fallen release_threshold of the way to its
/// final value; time_alt uses 1 - release_threshold.
SimResult simulate_release(const ClutchConfig& c, const LoadCellModel& lc, double force_ratio = 0.8,
                           const SimOptions& opt = {});

}  // namespace eaclutch
