#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eaclutch/dynamics/config.hpp"
#include "eaclutch/dynamics/statics.hpp"

namespace eaclutch {

/// One load-cell recording. Markers are NaN until set or detected.
struct Trace {
    double sample_rate = 38400.0;  // Hz
    std::vector<double> t;         // s
    std::vector<double> force;     // N
    std::vector<double> voltage;   // V
    double t_on = std::numeric_limits<double>::quiet_NaN();
    double t_off = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return t.size(); }
    /// Equal lengths, uniform sampling within 1 ppm, markers inside the record.
    /// Throws FormatError. Also refreshes sample_rate from t.
    void validate();
};

/// Sets any unset marker from the first rising / last falling crossing of
/// 10 % of max |V|.
void detect_markers(Trace& tr);

/// CSV with header t_s,force_n,voltage_v and optional t_on_s / t_off_s
/// columns (first non-empty value used). Throws FormatError.
Trace load_trace(const std::string& path);
Trace parse_trace_csv(const std::string& text, const std::string& origin = "<memory>");

/// Second-order Butterworth section from the bilinear transform with
/// prewarping. Coefficients normalised so a0 = 1.
struct Biquad {
    double b0, b1, b2, a1, a2;
};
Biquad butterworth_lowpass(double cutoff_hz, double sample_rate);

/// Forward-backward pass of a biquad with odd-reflection padding and
/// steady-state initial conditions.
std::vector<double> filtfilt(const Biquad& q, std::span<const double> x);

/// Zero-phase low-pass of the force channel only. Throws DomainError unless
/// 0 < cutoff < sample_rate / 2.
Trace lowpass_zero_phase(const Trace& tr, double cutoff_hz = 250.0);

struct EngagementOptions {
    double baseline_window = 10e-3;  // before t_on
    double fit_start = 0.5e-3;       // after t_on
    double end_min = 2e-3;
    double end_max = 20e-3;
    double min_r2 = 0.8;
};

struct EngagementResult {
    double time = 0.0;        // s after t_on
    bool qualified = false;   // some fit passed the R^2 cut
    bool rounded_up = false;  // fits passed but none crossed after t_on
    int fits_kept = 0;
    double baseline = 0.0;
};

/// Back-extrapolated line fits to the baseline. Expects a filtered trace.
EngagementResult extract_engagement_time(const Trace& tr, const EngagementOptions& opt = {});

struct ReleaseOptions {
    double threshold = 0.9;
    double final_fraction = 0.2;  // tail of the record averaged for the final value
    double min_settle = 0.5;      // s of record required after t_off
};

struct ReleaseResult {
    double time = 0.0;  // s after t_off
    double start_force = 0.0;
    double final_force = 0.0;
};

/// First fall of threshold of the way from the force at t_off to the final
/// value. Throws InsufficientData or NoRelease.
ReleaseResult extract_release_time(const Trace& tr, const ReleaseOptions& opt = {});

struct SlipOptions {
    double noise_window = 10e-3;  // pre-voltage segment for the noise estimate
    double noise_factor = 3.0;
    double drop_window = 5e-3;
};

/// Largest 100 (peak - trough) / peak over detected slips in [t_on, t_off].
double slip_percentage(const Trace& tr, const SlipOptions& opt = {});

/// Mean force over [t0, t0 + window] of the pre-voltage segment, through
/// preload_from_baseline. window defaults to 3 s; throws InsufficientData.
PreloadEstimate estimate_preload(const Trace& tr, const ClutchConfig& c, double window = 3.0);

struct PowerLawFit {
    double c = 0.0;
    double n = 0.0;
    double se_c = 0.0;
    double se_n = 0.0;
    double r2 = 0.0;
};

/// F = c V^n by ordinary least squares on (ln V, ln F).
PowerLawFit fit_voltage_exponent(std::span<const double> v, std::span<const double> f);

}  // namespace eaclutch
