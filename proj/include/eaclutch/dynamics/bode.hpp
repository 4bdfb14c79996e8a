#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eaclutch/dynamics/config.hpp"
#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

struct BodeOptions {
    // Skip the gap integration and balance period-averaged forces at a fixed gap.
    bool quasi_static = false;
    int samples_per_period = 256;
    int max_periods = 400;
    double settle_rel = 1e-7;  // period-to-period change of the mean contact force
    Tolerance tol = kPhysicsTolerance;
    std::shared_ptr<const RelaxationKernel> kernel;
};

struct CapacityPoint {
    double frequency = 0.0;
    double capacity = 0.0;
    double mean_gap = 0.0;
    double mean_contact = 0.0;
    double mean_ea = 0.0;  // lambda-weighted
    int periods = 0;
    bool settled = true;
};

struct BodeResult {
    double dc_capacity = 0.0;
    std::vector<CapacityPoint> points;
    double f_3db = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

/// Shear capacity under a steady bipolar drive at each frequency, plus the dc
/// limit and the -3 dB point relative to it.
BodeResult capacity_vs_frequency(const ClutchConfig& c, std::span<const double> freqs, const BodeOptions& opt = {});

/// First downward crossing of dc/sqrt(2), log-interpolated in frequency.
/// NaN if the response never drops that far.
double minus_3db_frequency(double dc_capacity, std::span<const CapacityPoint> points);

struct CapacityObservation {
    double voltage;
    double frequency;
    double capacity;  // N
};

struct LambdaFit {
    std::vector<double> voltages;  // distinct, ascending
    std::vector<double> lambdas;   // best fixed multiplier per voltage
    std::vector<double> se_lambdas;
    double intercept = 0.0;        // straight line through (voltage, lambda)
    double slope = 0.0;
    double r2 = std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    double residual_norm = 0.0;    // of capacities, N
};

/// Fits one multiplier per voltage against measured capacity-vs-frequency
/// curves, then a line through them. opt applies to every model evaluation
/// (quasi_static keeps it cheap).
LambdaFit fit_lambda_law(const ClutchConfig& c, std::span<const CapacityObservation> data, const BodeOptions& opt);

}  // namespace eaclutch
