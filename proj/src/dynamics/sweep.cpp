#include "eaclutch/dynamics/sweep.hpp"

#include <mutex>

#include <omp.h>

#include "eaclutch/errors.hpp"

namespace eaclutch {

void apply_axis(ClutchConfig& c, const std::string& name, double value) {
    if (name == "voltage") {
        c.drive.amplitude = value;
    } else if (name == "substrate_width") {
        c.geometry.substrate_width = value;
    } else if (name == "dielectric_thickness") {
        c.set_dielectric_thickness(value);
    } else if (name == "overlap_length") {
        c.geometry.substrate_overlap_length = value;
    } else if (name == "rise_time") {
        c.drive.tau_rise = DriveSignal::tau_from_transition(value);
    } else if (name == "fall_time") {
        c.drive.tau_fall = DriveSignal::tau_from_transition(value);
    } else if (name == "tau_rise") {
        c.drive.tau_rise = value;
    } else if (name == "tau_fall") {
        c.drive.tau_fall = value;
    } else if (name == "frequency") {
        c.drive.frequency = value;
    } else if (name == "preload") {
        c.f_preload = value;
    } else {
        throw ConfigError("axes." + name, "unknown sweep axis");
    }
}

SweepRow evaluate_cell(const ClutchConfig& c, SweepMetric metric, const SweepOptions& opt) {
    SweepRow row;
    SimOptions so = opt.sim;
    so.record_trace = false;
    try {
        const SimResult r = metric == SweepMetric::engage ? simulate_engagement(c, so)
                                                          : simulate_release(c, opt.loadcell, opt.force_ratio, so);
        row.metric = r.time;
        row.metric_alt = r.time_alt;
        row.initial_gap = r.initial_gap;
        row.settled_gap = r.settled_gap;
        row.capacity = r.capacity;
        row.reason = r.reason;
    } catch (const std::exception& e) {
        row.reason = Termination::failed;
        row.error = e.what();
    }
    return row;
}

SweepTable parameter_sweep(const ClutchConfig& base, std::span<const SweepAxis> axes, SweepMetric metric,
                           const SweepOptions& opt) {
    SweepTable table;
    table.metric = metric;
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.values.empty()) throw ConfigError("axes." + a.name, "grid is empty");
        table.axis_names.push_back(a.name);
        total *= a.values.size();
        ClutchConfig probe = base;
        apply_axis(probe, a.name, a.values.front());  // reject unknown names up front
    }

    // all cells share one relaxation table per alpha
    SweepOptions o = opt;
    if (!o.sim.kernel) o.sim.kernel = relaxation_kernel_for(base.dielectric.alpha);

    table.rows.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        std::vector<double> in(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            in[k] = axes[k].values[rem % axes[k].values.size()];
            rem /= axes[k].values.size();
        }
        table.rows[i].inputs = std::move(in);
    }

    std::mutex progress_mu;
    std::size_t done = 0;
    auto run = [&](std::size_t i) {
        ClutchConfig c = base;
        SweepRow row;
        try {
            for (std::size_t k = 0; k < axes.size(); ++k) apply_axis(c, axes[k].name, table.rows[i].inputs[k]);
            row = evaluate_cell(c, metric, o);
        } catch (const std::exception& e) {
            row.reason = Termination::failed;
            row.error = e.what();
        }
        row.inputs = table.rows[i].inputs;
        table.rows[i] = std::move(row);
        if (o.progress) {
            std::lock_guard<std::mutex> lock(progress_mu);
            o.progress(++done, total);
        }
    };

    if (o.parallel && total > 1) {
        const int n = static_cast<int>(total);
        const int threads = o.threads > 0 ? o.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < total; ++i) run(i);
    }
    return table;
}

}  // namespace eaclutch
