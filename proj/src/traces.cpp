#include "eaclutch/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eaclutch/errors.hpp"
#include "eaclutch/io/csv.hpp"

namespace eaclutch {

namespace {

// index of the first sample at or after time x
std::size_t first_at_or_after(const std::vector<double>& t, double x) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), x) - t.begin());
}

double interp(const std::vector<double>& t, const std::vector<double>& y, double x) {
    const std::size_t i = first_at_or_after(t, x);
    if (i == 0) return y.front();
    if (i >= t.size()) return y.back();
    const double u = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return y[i - 1] + u * (y[i] - y[i - 1]);
}

void require_marker(double m, const char* name, const char* op) {
    if (std::isnan(m)) throw InsufficientData(std::string(op) + ": marker " + name + " is not set");
}

// single pass of the transposed direct form II section
void run_biquad(const Biquad& q, std::vector<double>& x, double z1, double z2) {
    for (double& v : x) {
        const double y = q.b0 * v + z1;
        z1 = q.b1 * v - q.a1 * y + z2;
        z2 = q.b2 * v - q.a2 * y;
        v = y;
    }
}

}  // namespace

void Trace::validate() {
    const std::size_t n = t.size();
    if (force.size() != n || voltage.size() != n) throw FormatError("trace: t, force and voltage lengths differ");
    if (n < 2) throw FormatError("trace: need at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw FormatError("trace: time must increase");
    for (std::size_t i = 1; i < n; ++i) {
        const double d = t[i] - t[i - 1];
        if (std::abs(d - dt) > 1e-6 * dt) {
            throw FormatError("trace: non-uniform sampling at row " + std::to_string(i) + " (step " +
                              io::format_number(d) + " s vs " + io::format_number(dt) + " s)");
        }
    }
    sample_rate = 1.0 / dt;
    for (double m : {t_on, t_off}) {
        if (!std::isnan(m) && (m < t.front() || m > t.back())) throw FormatError("trace: marker outside the record");
    }
    if (!std::isnan(t_on) && !std::isnan(t_off) && t_off < t_on) throw FormatError("trace: t_off before t_on");
}

void detect_markers(Trace& tr) {
    double vmax = 0.0;
    for (double v : tr.voltage) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return;
    const double level = 0.1 * vmax;
    const std::size_t n = tr.size();
    if (std::isnan(tr.t_on)) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(tr.voltage[i]) >= level) {
                tr.t_on = tr.t[i];
                break;
            }
        }
    }
    if (std::isnan(tr.t_off)) {
        // last sample above the level; the next one is the first after the fall
        for (std::size_t i = n; i-- > 0;) {
            if (std::abs(tr.voltage[i]) >= level) {
                if (i + 1 < n) tr.t_off = tr.t[i + 1];
                break;
            }
        }
    }
}

Trace parse_trace_csv(const std::string& text, const std::string& origin) {
    const io::CsvTable tab = io::parse_csv(text, origin);
    Trace tr;
    try {
        tr.t = tab.column("t_s");
        tr.force = tab.column("force_n");
        tr.voltage = tab.column("voltage_v");
    } catch (const FormatError& e) {
        throw FormatError(origin + ": " + e.what());
    }
    auto first_finite = [&](const char* name) {
        if (!tab.has(name)) return std::numeric_limits<double>::quiet_NaN();
        for (double v : tab.column(name))
            if (!std::isnan(v)) return v;
        return std::numeric_limits<double>::quiet_NaN();
    };
    tr.t_on = first_finite("t_on_s");
    tr.t_off = first_finite("t_off_s");
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (!std::isfinite(tr.t[i]) || !std::isfinite(tr.force[i]) || !std::isfinite(tr.voltage[i]))
            throw FormatError(origin + ": non-finite sample at data row " + std::to_string(i + 1));
    }
    try {
        tr.validate();
    } catch (const FormatError& e) {
        throw FormatError(origin + ": " + e.what());
    }
    detect_markers(tr);
    return tr;
}

Trace load_trace(const std::string& path) { return parse_trace_csv(io::read_file(path), path); }

Biquad butterworth_lowpass(double cutoff_hz, double sample_rate) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate))
        throw DomainError("butterworth_lowpass: cutoff must lie in (0, sample_rate/2)");
    const double K = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
    const double r2 = std::numbers::sqrt2;
    const double norm = 1.0 / (1.0 + r2 * K + K * K);
    Biquad q;
    q.b0 = K * K * norm;
    q.b1 = 2.0 * q.b0;
    q.b2 = q.b0;
    q.a1 = 2.0 * (K * K - 1.0) * norm;
    q.a2 = (1.0 - r2 * K + K * K) * norm;
    return q;
}

std::vector<double> filtfilt(const Biquad& q, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return {x.begin(), x.end()};
    // state that holds a constant input in steady state
    const double gain = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double zi1 = gain - q.b0, zi2 = q.b2 - q.a2 * gain;

    const std::size_t pad = std::min<std::size_t>(n - 1, 9);
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    run_biquad(q, ext, zi1 * ext.front(), zi2 * ext.front());
    std::reverse(ext.begin(), ext.end());
    run_biquad(q, ext, zi1 * ext.front(), zi2 * ext.front());
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Trace lowpass_zero_phase(const Trace& tr, double cutoff_hz) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * tr.sample_rate))
        throw DomainError("lowpass_zero_phase: cutoff must lie in (0, sample_rate/2)");
    Trace out = tr;
    out.force = filtfilt(butterworth_lowpass(cutoff_hz, tr.sample_rate), tr.force);
    return out;
}

EngagementResult extract_engagement_time(const Trace& tr, const EngagementOptions& opt) {
    require_marker(tr.t_on, "t_on", "extract_engagement_time");
    const double t0 = tr.t_on;
    if (tr.t.front() > t0 - opt.baseline_window + 0.5 / tr.sample_rate)
        throw InsufficientData("extract_engagement_time: need " + io::format_number(opt.baseline_window) +
                               " s of data before t_on");
    EngagementResult res;
    const std::size_t b0 = first_at_or_after(tr.t, t0 - opt.baseline_window);
    const std::size_t b1 = first_at_or_after(tr.t, t0);
    double base = 0.0;
    for (std::size_t i = b0; i < b1; ++i) base += tr.force[i];
    res.baseline = base / static_cast<double>(b1 - b0);

    // running sums over the fit window, time measured from t_on
    const std::size_t s = first_at_or_after(tr.t, t0 + opt.fit_start);
    const double eps = 1e-9 / tr.sample_rate;
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = s; i < tr.size(); ++i) {
        const double x = tr.t[i] - t0, y = tr.force[i];
        if (x > opt.end_max + eps) break;
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        if (x < opt.end_min - eps || n < 3) continue;
        const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
        if (!(cxx > 0.0) || !(cyy > 0.0)) continue;
        const double slope = cxy / cxx;
        const double r2 = cxy * cxy / (cxx * cyy);
        if (!(r2 > opt.min_r2) || slope == 0.0) continue;
        ++res.fits_kept;
        const double intercept = (sy - slope * sx) / n;
        const double cross = (res.baseline - intercept) / slope;
        if (cross > 0.0) best = std::min(best, cross);
    }
    res.qualified = res.fits_kept > 0;
    if (std::isfinite(best)) {
        res.time = best;
    } else {
        res.time = 0.0;
        res.rounded_up = res.qualified;
    }
    return res;
}

ReleaseResult extract_release_time(const Trace& tr, const ReleaseOptions& opt) {
    require_marker(tr.t_off, "t_off", "extract_release_time");
    if (!(opt.threshold > 0.0 && opt.threshold < 1.0)) throw DomainError("extract_release_time: threshold in (0,1)");
    if (!(opt.final_fraction > 0.0 && opt.final_fraction <= 1.0))
        throw DomainError("extract_release_time: final_fraction in (0,1]");
    if (tr.t.back() - tr.t_off < opt.min_settle)
        throw InsufficientData("extract_release_time: need " + io::format_number(opt.min_settle) +
                               " s of record after t_off");
    ReleaseResult res;
    const std::size_t n = tr.size();
    const auto tail = static_cast<std::size_t>(std::ceil(opt.final_fraction * static_cast<double>(n)));
    double fin = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) fin += tr.force[i];
    res.final_force = fin / static_cast<double>(tail);
    res.start_force = interp(tr.t, tr.force, tr.t_off);
    const double drop = res.start_force - res.final_force;
    if (drop == 0.0) throw NoRelease("extract_release_time: force at t_off equals the final value");
    const double level = res.start_force - opt.threshold * drop;
    const double dir = drop > 0.0 ? 1.0 : -1.0;

    double tp = tr.t_off, fp = res.start_force;
    for (std::size_t i = first_at_or_after(tr.t, tr.t_off); i < n; ++i) {
        if (tr.t[i] <= tr.t_off) {
            fp = tr.force[i];
            continue;
        }
        const double f = tr.force[i];
        if (dir * (f - level) <= 0.0) {
            const double u = (fp - level) / (fp - f);
            res.time = tp + u * (tr.t[i] - tp) - tr.t_off;
            return res;
        }
        tp = tr.t[i];
        fp = f;
    }
    throw NoRelease("extract_release_time: force never fell to the threshold");
}

double slip_percentage(const Trace& tr, const SlipOptions& opt) {
    require_marker(tr.t_on, "t_on", "slip_percentage");
    const double t_end = std::isnan(tr.t_off) ? tr.t.back() : tr.t_off;
    const std::size_t a = first_at_or_after(tr.t, tr.t_on);
    // samples from t_off on belong to the release, not to a slip
    const std::size_t b = first_at_or_after(tr.t, t_end);
    if (a >= b) return 0.0;

    // noise from the pre-voltage segment
    const std::size_t n0 = first_at_or_after(tr.t, tr.t_on - opt.noise_window);
    double sigma = 0.0;
    if (a > n0 + 1) {
        double m = 0.0;
        for (std::size_t i = n0; i < a; ++i) m += tr.force[i];
        m /= static_cast<double>(a - n0);
        for (std::size_t i = n0; i < a; ++i) sigma += (tr.force[i] - m) * (tr.force[i] - m);
        sigma = std::sqrt(sigma / static_cast<double>(a - n0 - 1));
    }
    const double min_drop = opt.noise_factor * sigma;
    const auto w = static_cast<std::size_t>(std::max(1.0, std::round(opt.drop_window * tr.sample_rate)));

    double worst = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        const double peak = tr.force[i];
        if (!(peak > 0.0)) continue;
        // local maximum over the drop window on both sides
        const std::size_t lo = i > a + w ? i - w : a, hi = std::min(b, i + w + 1);
        bool is_max = true;
        for (std::size_t j = lo; j < hi && is_max; ++j) is_max = tr.force[j] <= peak;
        if (!is_max) continue;
        double trough = peak;
        for (std::size_t j = i + 1; j < hi; ++j) trough = std::min(trough, tr.force[j]);
        const double d = peak - trough;
        if (d > min_drop && d > 0.0) worst = std::max(worst, 100.0 * d / peak);
    }
    return worst;
}

PreloadEstimate estimate_preload(const Trace& tr, const ClutchConfig& c, double window) {
    const double t_end = std::isnan(tr.t_on) ? tr.t.back() : tr.t_on;
    if (t_end - tr.t.front() < window - 0.5 / tr.sample_rate)
        throw InsufficientData("estimate_preload: need " + io::format_number(window) +
                               " s of data before the voltage is enabled");
    const std::size_t a = first_at_or_after(tr.t, t_end - window);
    const std::size_t b = first_at_or_after(tr.t, t_end);
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m += tr.force[i];
    m /= static_cast<double>(std::max<std::size_t>(1, b - a));
    return preload_from_baseline(m, c);
}

PowerLawFit fit_voltage_exponent(std::span<const double> v, std::span<const double> f) {
    if (v.size() != f.size()) throw DomainError("fit_voltage_exponent: length mismatch");
    if (v.size() < 3) throw InsufficientData("fit_voltage_exponent: need at least 3 points");
    const double n = static_cast<double>(v.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> x(v.size()), y(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !(f[i] > 0.0)) throw DomainError("fit_voltage_exponent: V and F must be > 0");
        x[i] = std::log(v[i]);
        y[i] = std::log(f[i]);
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateFit("fit_voltage_exponent: all voltages equal");
    PowerLawFit out;
    out.n = sxy / sxx;
    const double lnc = my - out.n * mx;
    out.c = std::exp(lnc);
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - lnc - out.n * x[i];
        sse += r * r;
    }
    const double s2 = sse / (n - 2.0);
    out.se_n = std::sqrt(s2 / sxx);
    out.se_c = out.c * std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    out.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return out;
}

}  // namespace eaclutch
