#include "eaclutch/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>
#include <json.hpp>

#include "eaclutch/contact.hpp"
#include "eaclutch/dynamics/bode.hpp"
#include "eaclutch/dynamics/simulate.hpp"
#include "eaclutch/dynamics/sweep.hpp"
#include "eaclutch/io/config_io.hpp"
#include "eaclutch/io/csv.hpp"
#include "eaclutch/polarization.hpp"
#include "eaclutch/traces.hpp"

namespace eaclutch::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs body, mapping exceptions onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
}

std::string config_path_or_nominal(const std::string& p) { return p.empty() ? nominal_config_path() : p; }

io::LoadedConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    const std::string p = config_path_or_nominal(path);
    if (!fs::exists(p)) throw UsageError("config file not found: " + p);
    try {
        return io::load_run_config(p, overrides);
    } catch (const FormatError& e) {
        throw ConfigError(p, e.what());
    }
}

void prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir);
}

void write_manifest(const CommonArgs& args, const std::string& command, const std::string& hash) {
    RunManifest m;
    m.config_path = config_path_or_nominal(args.config);
    m.command = command;
    m.overrides = args.overrides;
    m.output_dir = args.out_dir;
    m.seed = args.seed;
    m.config_hash = hash;
    m.write(args.out_dir);
}

// JSON numbers that may be NaN are written as null
json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::string& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

std::vector<double> parse_values(const std::string& name, const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') throw UsageError("axis " + name + ": not a number: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("axis " + name + " is empty");
    return out;
}

SweepMetric parse_metric(const std::string& m) {
    if (m == "engage") return SweepMetric::engage;
    if (m == "release") return SweepMetric::release;
    throw UsageError("metric must be engage or release, got '" + m + "'");
}

struct NamedSweep {
    std::string name;
    SweepMetric metric = SweepMetric::engage;
    std::vector<SweepAxis> axes;
};

std::vector<SweepAxis> axes_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw UsageError(where + ": axes must be a non-empty array");
    std::vector<SweepAxis> out;
    for (const auto& a : j) {
        if (!a.contains("name") || !a.contains("values") || !a["values"].is_array())
            throw UsageError(where + ": each axis needs a name and a values array");
        SweepAxis ax;
        ax.name = a["name"].get<std::string>();
        for (const auto& v : a["values"]) {
            if (!v.is_number()) throw UsageError(where + ": axis " + ax.name + " has a non-numeric value");
            ax.values.push_back(v.get<double>());
        }
        if (ax.values.empty()) throw UsageError(where + ": axis " + ax.name + " is empty");
        out.push_back(std::move(ax));
    }
    return out;
}

std::vector<NamedSweep> read_sweep_spec(const std::string& path) {
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded()) throw UsageError(path + ": not valid JSON");
    std::vector<NamedSweep> out;
    auto one = [&](const json& s, const std::string& fallback) {
        NamedSweep n;
        n.name = s.value("name", fallback);
        n.metric = parse_metric(s.value("metric", std::string("engage")));
        n.axes = axes_from_json(s.value("axes", json()), path + ":" + n.name);
        out.push_back(std::move(n));
    };
    if (j.contains("sweeps")) {
        int k = 0;
        for (const auto& s : j["sweeps"]) one(s, "sweep" + std::to_string(k++));
    } else {
        one(j, "sweep");
    }
    if (out.empty()) throw UsageError(path + ": no sweeps");
    return out;
}

void write_sweep_csv(const std::string& path, const SweepTable& t) {
    std::ostringstream os;
    std::vector<std::string> header = t.axis_names;
    const std::string m = t.metric == SweepMetric::engage ? "engage" : "release";
    header.insert(header.end(), {m + "_s", m + "_alt_s", "initial_gap_m", "settled_gap_m", "capacity_n",
                                 "termination", "error"});
    io::CsvWriter w(os, header);
    for (const auto& r : t.rows) {
        std::vector<io::Cell> cells(r.inputs.begin(), r.inputs.end());
        cells.insert(cells.end(), {r.metric, r.metric_alt, r.initial_gap, r.settled_gap, r.capacity,
                                   std::string(to_string(r.reason)), r.error});
        w.row(cells);
    }
    io::write_file(path, os.str());
}

struct Stats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    long long count = 0;
};

Stats stats_of(const std::vector<double>& v) {
    Stats s;
    double sum = 0.0;
    for (double x : v)
        if (std::isfinite(x)) {
            sum += x;
            ++s.count;
        }
    if (s.count == 0) return s;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double x : v)
            if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

std::vector<double> log_space(double a, double b, int n) {
    if (!(a > 0.0) || !(b >= a) || n < 1) throw UsageError("frequency range needs 0 < fmin <= fmax and points >= 1");
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return out;
}

}  // namespace

std::string nominal_config_path() { return std::string(EACLUTCH_DATA_DIR) + "/nominal.json"; }

void RunManifest::write(const std::string& dir) const {
    json j;
    j["config_path"] = config_path;
    j["command"] = command;
    j["overrides"] = overrides;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    write_json((fs::path(dir) / "manifest.json").string(), j);
}

int cmd_simulate(const std::string& kind, const CommonArgs& args, double threshold, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        if (kind != "engage" && kind != "release") throw UsageError("simulate kind must be engage or release");
        io::LoadedConfig lc = load_config(args.config, args.overrides);
        ClutchConfig c = lc.config.clutch;
        if (!std::isnan(threshold)) {
            if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("--threshold must lie in (0, 1)");
            (kind == "engage" ? c.engage_threshold : c.release_threshold) = threshold;
        }
        prepare_dir(args.out_dir);
        const bool rel = kind == "release";
        const SimResult r = rel ? simulate_release(c, lc.config.loadcell, lc.config.force_ratio)
                                : simulate_engagement(c);

        std::ostringstream os;
        std::vector<std::string> header{"t_s", "gap_m", "gapvel_mps", "shear_n", "voltage_v", "kappa_eff"};
        if (rel) header.push_back("loadcell_x_m");
        io::CsvWriter w(os, header);
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            std::vector<double> row{r.trace.t[i],     r.trace.gap[i],     r.trace.gap_velocity[i],
                                    r.trace.shear[i], r.trace.voltage[i], r.trace.kappa[i]};
            if (rel) row.push_back(r.trace.loadcell_x[i]);
            w.row(row);
        }
        io::write_file((fs::path(args.out_dir) / "trace.csv").string(), os.str());

        json s;
        s["kind"] = kind;
        s[rel ? "t_release_s" : "t_engage_s"] = num_or_null(r.time);
        if (rel) s["t_release_alt_s"] = num_or_null(r.time_alt);
        s["termination_reason"] = to_string(r.reason);
        s["initial_gap_m"] = r.initial_gap;
        s["settled_gap_m"] = r.settled_gap;
        s["capacity_n"] = r.capacity;
        s["warnings"] = r.warnings;
        write_json((fs::path(args.out_dir) / "summary.json").string(), s);
        write_manifest(args, "simulate " + kind, lc.hash);

        out << (rel ? "t_release = " : "t_engage = ") << io::format_number(r.time) << " s ("
            << to_string(r.reason) << "), capacity " << io::format_number(r.capacity) << " N\n";
        for (const auto& wmsg : r.warnings) err << "warning: " << wmsg << '\n';
        return (r.reason == Termination::failed || std::isnan(r.time)) ? int(kRuntimeFailure) : int(kOk);
    });
}

int cmd_sweep(const CommonArgs& args, const SweepArgs& sweep, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<NamedSweep> sweeps;
        if (!sweep.spec.empty()) sweeps = read_sweep_spec(sweep.spec);
        if (!sweep.axes.empty()) {
            NamedSweep n;
            n.name = "sweep";
            for (const auto& a : sweep.axes) {
                const auto eq = a.find('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("axis must look like name=v1,v2,...");
                n.axes.push_back({a.substr(0, eq), parse_values(a.substr(0, eq), a.substr(eq + 1))});
            }
            sweeps.push_back(std::move(n));
        }
        if (sweeps.empty()) throw UsageError("sweep needs --spec or at least one --axis");
        if (!sweep.metric.empty())
            for (auto& s : sweeps) s.metric = parse_metric(sweep.metric);

        io::LoadedConfig lc = load_config(args.config, args.overrides);
        prepare_dir(args.out_dir);
        SweepOptions opt;
        opt.loadcell = lc.config.loadcell;
        opt.force_ratio = lc.config.force_ratio;
        opt.parallel = !sweep.serial;
        opt.threads = sweep.threads;
        bool any_failed = false;
        for (const auto& s : sweeps) {
            if (!sweep.quiet) {
                opt.progress = [&err, &s](std::size_t done, std::size_t total) {
                    err << "\r" << s.name << ": " << done << "/" << total << std::flush;
                    if (done == total) err << '\n';
                };
            }
            const SweepTable t = parameter_sweep(lc.config.clutch, s.axes, s.metric, opt);
            const std::string path = (fs::path(args.out_dir) / (s.name + ".csv")).string();
            write_sweep_csv(path, t);
            std::size_t failed = 0;
            for (const auto& r : t.rows) failed += r.reason == Termination::failed;
            any_failed = any_failed || failed > 0;
            out << path << ": " << t.rows.size() << " cells";
            if (failed) out << ", " << failed << " failed";
            out << '\n';
        }
        write_manifest(args, "sweep", lc.hash);
        return any_failed ? int(kRuntimeFailure) : int(kOk);
    });
}

int cmd_fit(const std::string& kind, const std::string& data_file, const CommonArgs& args, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&] {
        if (data_file.empty()) throw UsageError("fit needs a data file");
        io::LoadedConfig lc = load_config(args.config, args.overrides);
        const ClutchConfig& c = lc.config.clutch;
        const io::CsvTable tab = io::read_csv(data_file);
        prepare_dir(args.out_dir);
        json res;
        res["kind"] = kind;
        std::ostringstream model;

        if (kind == "cole_cole") {
            const auto& f = tab.column("frequency_hz");
            const auto& k = tab.column("kappa_real");
            std::vector<PermittivityPoint> pts;
            for (std::size_t i = 0; i < f.size(); ++i) pts.push_back({f[i], k[i]});
            const ColeColeFit fit = fit_cole_cole(pts, c.dielectric.kappa_inf);
            res["params"] = {{"kappa_s", fit.kappa_s}, {"tau", fit.tau}, {"alpha", fit.alpha}};
            res["std_errors"] = {{"kappa_s", fit.se_kappa_s}, {"tau", fit.se_tau}, {"alpha", fit.se_alpha}};
            res["residual_norm"] = fit.residual_norm;
            res["clamped"] = fit.clamped;
            DielectricModel m = c.dielectric;
            m.kappa_s = fit.kappa_s;
            m.tau = fit.tau;
            m.alpha = fit.alpha;
            io::CsvWriter w(model, {"frequency_hz", "kappa_real_data", "kappa_real_model"});
            for (const auto& p : pts)
                w.row(std::vector<double>{p.frequency_hz, p.kappa_real,
                                          cole_cole_kappa(m, 2.0 * kPi * p.frequency_hz).real()});
        } else if (kind == "contact") {
            const auto& fn = tab.column("normal_force_n");
            const auto& cap = tab.column("capacitance_f");
            std::vector<CalibrationPoint> pts;
            for (std::size_t i = 0; i < fn.size(); ++i) pts.push_back({fn[i], cap[i]});
            const ContactFit fit = fit_contact_model(pts, c.geometry, c.dielectric.kappa_s);
            res["params"] = {{"stiffness_k", fit.model.stiffness_k}, {"sigma_d", fit.model.sigma_d}};
            res["std_errors"] = {{"stiffness_k", fit.se_stiffness_k}, {"sigma_d", fit.se_sigma_d}};
            res["residual_norm"] = fit.residual_norm;
            res["non_monotone_gaps"] = fit.non_monotone_gaps;
            io::CsvWriter w(model, {"normal_force_n", "capacitance_data_f", "capacitance_model_f", "gap_m"});
            for (std::size_t i = 0; i < pts.size(); ++i)
                w.row(std::vector<double>{pts[i].normal_force, pts[i].capacitance, fit.predicted_capacitance[i],
                                          fit.gaps[i]});
        } else if (kind == "lambda") {
            const auto& v = tab.column("voltage_v");
            const auto& f = tab.column("frequency_hz");
            const auto& cap = tab.column("capacity_n");
            std::vector<CapacityObservation> obs;
            for (std::size_t i = 0; i < v.size(); ++i) obs.push_back({v[i], f[i], cap[i]});
            BodeOptions bo;
            bo.quasi_static = true;
            const LambdaFit fit = fit_lambda_law(c, obs, bo);
            res["params"] = {{"intercept", fit.intercept}, {"slope", fit.slope}};
            res["r2"] = num_or_null(fit.r2);
            res["mean_lambda"] = fit.mean;
            res["residual_norm"] = fit.residual_norm;
            json per = json::array();
            for (std::size_t i = 0; i < fit.voltages.size(); ++i)
                per.push_back({{"voltage", fit.voltages[i]}, {"lambda", fit.lambdas[i]}, {"std_error", fit.se_lambdas[i]}});
            res["per_voltage"] = per;
            io::CsvWriter w(model, {"voltage_v", "frequency_hz", "capacity_data_n", "capacity_model_n"});
            for (std::size_t k = 0; k < fit.voltages.size(); ++k) {
                ClutchConfig cv = c;
                cv.drive.amplitude = fit.voltages[k];
                cv.lambda.law = LambdaLaw::fixed;
                cv.lambda.fixed_value = fit.lambdas[k];
                std::vector<double> freqs, meas;
                for (const auto& o : obs)
                    if (o.voltage == fit.voltages[k]) {
                        freqs.push_back(o.frequency);
                        meas.push_back(o.capacity);
                    }
                const BodeResult b = capacity_vs_frequency(cv, freqs, bo);
                for (std::size_t i = 0; i < freqs.size(); ++i)
                    w.row(std::vector<double>{fit.voltages[k], freqs[i], meas[i], b.points[i].capacity});
            }
        } else if (kind == "voltage_exponent") {
            const auto& v = tab.column("voltage_v");
            const auto& f = tab.column("force_n");
            const PowerLawFit fit = fit_voltage_exponent(v, f);
            res["params"] = {{"c", fit.c}, {"n", fit.n}};
            res["std_errors"] = {{"c", fit.se_c}, {"n", fit.se_n}};
            res["r2"] = fit.r2;
            io::CsvWriter w(model, {"voltage_v", "force_data_n", "force_model_n"});
            for (std::size_t i = 0; i < v.size(); ++i)
                w.row(std::vector<double>{v[i], f[i], fit.c * std::pow(v[i], fit.n)});
        } else {
            throw UsageError("fit kind must be cole_cole, contact, lambda or voltage_exponent");
        }
        write_json((fs::path(args.out_dir) / "fit.json").string(), res);
        io::write_file((fs::path(args.out_dir) / "model.csv").string(), model.str());
        write_manifest(args, "fit " + kind, lc.hash);
        out << res["params"].dump() << '\n';
        return int(kOk);
    });
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.files.empty()) throw UsageError("analyze needs at least one trace file");
        io::LoadedConfig lc = load_config(args.config, args.overrides);
        prepare_dir(args.out_dir);

        struct Row {
            double engage = NAN, r90 = NAN, r10 = NAN, slip = NAN, preload = NAN;
            std::string quality, error;
            bool load_failed = false;
        };
        std::vector<Row> rows(args.files.size());
        const int n = static_cast<int>(args.files.size());
        const ClutchConfig& c = lc.config.clutch;
#pragma omp parallel for schedule(dynamic, 1) num_threads(args.threads > 0 ? args.threads : omp_get_max_threads())
        for (int i = 0; i < n; ++i) {
            Row& r = rows[static_cast<std::size_t>(i)];
            std::vector<std::string> flags, errors;
            // each metric fails on its own; the row keeps whatever succeeded
            auto attempt = [&](const char* what, auto&& fn) {
                try {
                    fn();
                } catch (const std::exception& ex) {
                    errors.push_back(std::string(what) + ": " + ex.what());
                }
            };
            try {
                const Trace raw = load_trace(args.files[static_cast<std::size_t>(i)]);
                const Trace filt = lowpass_zero_phase(raw, args.cutoff_hz);
                attempt("engagement", [&] {
                    const EngagementResult e = extract_engagement_time(filt);
                    r.engage = e.time;
                    if (!e.qualified) flags.push_back("no_qualifying_fit");
                    if (e.rounded_up) flags.push_back("engage_rounded_up");
                });
                const Trace& rel = args.filter_release ? filt : raw;
                attempt("release", [&] {
                    ReleaseOptions ro;
                    ro.threshold = 0.9;
                    r.r90 = extract_release_time(rel, ro).time;
                    ro.threshold = 0.1;
                    r.r10 = extract_release_time(rel, ro).time;
                });
                attempt("slip", [&] { r.slip = slip_percentage(raw); });
                try {
                    const PreloadEstimate p = estimate_preload(raw, c);
                    r.preload = p.value;
                    if (p.clamped) flags.push_back("preload_clamped");
                } catch (const InsufficientData&) {
                    flags.push_back("preload_insufficient_data");
                }
            } catch (const std::exception& ex) {
                errors.push_back(ex.what());
                r.load_failed = true;
            }
            for (std::size_t k = 0; k < errors.size(); ++k) r.error += (k ? "; " : "") + errors[k];
            for (std::size_t k = 0; k < flags.size(); ++k) r.quality += (k ? ";" : "") + flags[k];
        }

        std::ostringstream os;
        io::CsvWriter w(os, {"file", "engagement_s", "release90_s", "release10_s", "slip_pct", "preload_n",
                             "quality", "error"});
        std::vector<double> ev, r90, r10, sl, pl;
        int failed = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            w.row(std::vector<io::Cell>{args.files[i], r.engage, r.r90, r.r10, r.slip, r.preload, r.quality, r.error});
            if (!r.error.empty()) {
                ++failed;
                err << args.files[i] << ": " << r.error << '\n';
                if (r.load_failed) continue;
            }
            ev.push_back(r.engage);
            r90.push_back(r.r90);
            r10.push_back(r.r10);
            sl.push_back(r.slip);
            pl.push_back(r.preload);
        }
        io::write_file((fs::path(args.out_dir) / "analysis.csv").string(), os.str());

        std::ostringstream ss;
        io::CsvWriter sw(ss, {"metric", "mean", "std", "count"});
        const std::pair<const char*, const std::vector<double>*> metrics[] = {
            {"engagement_s", &ev}, {"release90_s", &r90}, {"release10_s", &r10}, {"slip_pct", &sl}, {"preload_n", &pl}};
        for (const auto& [name, v] : metrics) {
            const Stats s = stats_of(*v);
            sw.row(std::vector<io::Cell>{std::string(name), s.mean, s.sd, s.count});
            if (s.count > 0)
                out << name << ": mean " << io::format_number(s.mean) << " (sd " << io::format_number(s.sd) << ", n = "
                    << s.count << ")\n";
        }
        io::write_file((fs::path(args.out_dir) / "summary.csv").string(), ss.str());
        CommonArgs ca;
        ca.config = args.config;
        ca.overrides = args.overrides;
        ca.out_dir = args.out_dir;
        write_manifest(ca, "analyze", lc.hash);
        return failed ? int(kRuntimeFailure) : int(kOk);
    });
}

int cmd_bode(const CommonArgs& args, const BodeArgs& bode, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const std::vector<double> freqs =
            bode.frequencies.empty() ? log_space(bode.f_min, bode.f_max, bode.points) : bode.frequencies;
        for (double f : freqs)
            if (!(f > 0.0)) throw UsageError("frequencies must be > 0");
        io::LoadedConfig lc = load_config(args.config, args.overrides);
        prepare_dir(args.out_dir);
        BodeOptions bo;
        bo.quasi_static = bode.quasi_static;
        const BodeResult r = capacity_vs_frequency(lc.config.clutch, freqs, bo);

        std::ostringstream os;
        io::CsvWriter w(os, {"frequency_hz", "capacity_n", "relative_db", "mean_gap_m", "mean_contact_n",
                             "mean_ea_n", "periods", "settled"});
        for (const auto& p : r.points)
            w.row(std::vector<io::Cell>{p.frequency, p.capacity, 20.0 * std::log10(p.capacity / r.dc_capacity), p.mean_gap,
                   p.mean_contact, p.mean_ea, static_cast<long long>(p.periods), static_cast<long long>(p.settled)});
        io::write_file((fs::path(args.out_dir) / "bode.csv").string(), os.str());
        json s;
        s["dc_capacity_n"] = r.dc_capacity;
        s["f_3db_hz"] = num_or_null(r.f_3db);
        s["quasi_static"] = bode.quasi_static;
        s["warnings"] = r.warnings;
        write_json((fs::path(args.out_dir) / "summary.json").string(), s);
        write_manifest(args, "bode", lc.hash);
        out << "dc capacity " << io::format_number(r.dc_capacity) << " N, -3 dB at "
            << (std::isnan(r.f_3db) ? std::string("(not reached)") : io::format_number(r.f_3db) + " Hz") << '\n';
        for (const auto& wmsg : r.warnings) err << "warning: " << wmsg << '\n';
        return int(kOk);
    });
}

int run(int argc, char** argv) {
    CLI::App app{"Electroadhesive clutch model: simulation, fitting and trace analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonArgs common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON config (default: bundled nominal)");
        sub->add_option("--set", common.overrides, "dot-path override key=value (repeatable)");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "seed recorded in the manifest");
    };

    std::string sim_kind;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    auto* sim = app.add_subcommand("simulate", "engagement or release simulation");
    sim->add_option("kind", sim_kind, "engage | release")->required();
    sim->add_option("--threshold", threshold, "engage or release threshold fraction");
    add_common(sim);

    SweepArgs sw;
    auto* swp = app.add_subcommand("sweep", "parameter sweep to CSV");
    swp->add_option("--spec", sw.spec, "JSON sweep spec");
    swp->add_option("--axis", sw.axes, "name=v1,v2,... (repeatable)");
    swp->add_option("--metric", sw.metric, "engage | release");
    swp->add_option("--threads", sw.threads, "worker threads (0: OpenMP default)");
    swp->add_flag("--serial", sw.serial, "evaluate cells one at a time");
    swp->add_flag("--quiet", sw.quiet, "no progress output");
    add_common(swp);

    std::string fit_kind, fit_data;
    auto* fit = app.add_subcommand("fit", "parameter fits from CSV data");
    fit->add_option("kind", fit_kind, "cole_cole | contact | lambda | voltage_exponent")->required();
    fit->add_option("data", fit_data, "CSV data file")->required();
    add_common(fit);

    AnalyzeArgs an;
    auto* ana = app.add_subcommand("analyze", "batch load-cell trace analysis");
    ana->add_option("files", an.files, "trace CSV files");
    ana->add_option("--config", an.config, "JSON config for the preload estimate");
    ana->add_option("--set", an.overrides, "dot-path override key=value");
    ana->add_option("--out", an.out_dir, "output directory");
    ana->add_option("--cutoff", an.cutoff_hz, "low-pass cutoff for engagement, Hz");
    ana->add_flag("--filter-release", an.filter_release, "extract release from the filtered channel");
    ana->add_option("--threads", an.threads, "worker threads");

    BodeArgs bo;
    auto* bod = app.add_subcommand("bode", "shear capacity vs drive frequency");
    bod->add_option("--freq", bo.frequencies, "explicit frequencies, Hz")->delimiter(',');
    bod->add_option("--fmin", bo.f_min, "lowest frequency, Hz");
    bod->add_option("--fmax", bo.f_max, "highest frequency, Hz");
    bod->add_option("--points", bo.points, "log-spaced points");
    bod->add_flag("--quasi-static", bo.quasi_static, "balance period-averaged forces instead of integrating");
    add_common(bod);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? int(kOk) : int(kUsageError);
    }

    if (sim->parsed()) return cmd_simulate(sim_kind, common, threshold, std::cout, std::cerr);
    if (swp->parsed()) return cmd_sweep(common, sw, std::cout, std::cerr);
    if (fit->parsed()) return cmd_fit(fit_kind, fit_data, common, std::cout, std::cerr);
    if (ana->parsed()) return cmd_analyze(an, std::cout, std::cerr);
    if (bod->parsed()) return cmd_bode(common, bo, std::cout, std::cerr);
    return kUsageError;
}

}  // namespace eaclutch::cli
