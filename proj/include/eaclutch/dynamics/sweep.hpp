#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eaclutch/dynamics/simulate.hpp"

namespace eaclutch {

enum class SweepMetric { engage, release };

/// One named grid. Recognised names: voltage, substrate_width,
/// dielectric_thickness, overlap_length, rise_time, fall_time (10-90 %
/// transition, s), tau_rise, tau_fall, frequency, preload.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

/// Sets one swept parameter on a config. Throws ConfigError for unknown names.
void apply_axis(ClutchConfig& c, const std::string& name, double value);

struct SweepRow {
    std::vector<double> inputs;  // one per axis
    double metric = std::numeric_limits<double>::quiet_NaN();
    double metric_alt = std::numeric_limits<double>::quiet_NaN();
    double initial_gap = std::numeric_limits<double>::quiet_NaN();
    double settled_gap = std::numeric_limits<double>::quiet_NaN();
    double capacity = std::numeric_limits<double>::quiet_NaN();
    Termination reason = Termination::none;
    std::string error;  // empty unless the cell failed
};

struct SweepTable {
    std::vector<std::string> axis_names;
    SweepMetric metric = SweepMetric::engage;
    std::vector<SweepRow> rows;
};

struct SweepOptions {
    LoadCellModel loadcell;
    double force_ratio = 0.8;
    SimOptions sim;
    bool parallel = true;
    int threads = 0;  // 0: OpenMP default
    // called after each finished cell (from any thread, serialized)
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Full cross product, rows in lexicographic order of the axes (last axis
/// fastest). Cell failures are recorded in the row and the sweep continues.
/// Output is identical whether cells run serially or in parallel.
SweepTable parameter_sweep(const ClutchConfig& base, std::span<const SweepAxis> axes, SweepMetric metric,
                           const SweepOptions& opt = {});

/// Evaluates one cell; exposed so tests can compare against the sweep.
SweepRow evaluate_cell(const ClutchConfig& c, SweepMetric metric, const SweepOptions& opt);

}  // namespace eaclutch
