// Regenerates the synthetic fixtures under data/. Deterministic: fixed seeds,
// fixed formatting. Usage: make_fixtures <data dir>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "eaclutch/contact.hpp"
#include "eaclutch/dynamics/bode.hpp"
#include "eaclutch/dynamics/statics.hpp"
#include "eaclutch/io/csv.hpp"
#include "eaclutch/polarization.hpp"

using namespace eaclutch;
namespace fs = std::filesystem;

namespace {

constexpr double kRate = 38400.0;

double gap_for_load(const ClutchConfig& c, double load) {
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    double lo = -5.0 * c.contact.sigma_d, hi = 20.0 * c.contact.sigma_d;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (contact_force(m, c.contact, L, w) > load ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

struct TraceWriter {
    std::ostringstream os;
    io::CsvWriter w{os, {"t_s", "force_n", "voltage_v"}};
    // time needs more digits than the default so steps stay uniform to 1 ppm
    void add(double t, double f, double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.15e", t);
        w.row(std::vector<io::Cell>{std::string(buf), f, v});
    }
};

// Load-cell record around one engagement and release. Force rises linearly
// from t_on + delay and falls after t_off with 90 % of the drop reached at
// t_fall90 (Gaussian-shaped decay).
std::string clutch_trace(double pre, double hold, double post, double delay, double t_fall90, double noise,
                         unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    const double f0 = 0.05, slope = 0.5;  // N, N/s
    const double t_on = pre, t_off = pre + hold;
    const double f_off = f0 + slope * (t_off - t_on - delay);
    const double width = t_fall90 / std::sqrt(std::log(10.0));
    TraceWriter tw;
    const auto n = static_cast<long long>(std::llround((pre + hold + post) * kRate));
    for (long long i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / kRate;
        double f = f0, v = 0.0;
        if (t >= t_on && t < t_off) {
            // 1 kHz bipolar drive, one electrode
            v = std::fmod(t - t_on, 1e-3) < 0.5e-3 ? 300.0 : -300.0;
            if (t > t_on + delay) f = f0 + slope * (t - t_on - delay);
        } else if (t >= t_off) {
            const double s = (t - t_off) / width;
            f = f0 + (f_off - f0) * std::exp(-s * s);
        }
        tw.add(t, f + noise * n01(rng), v);
    }
    return tw.os.str();
}

std::string sawtooth_trace() {
    // while the drive is on the force climbs from 0.05 to 0.1 N over 40 ms,
    // then snaps back: a 50 % slip each period
    TraceWriter tw;
    const double pre = 0.05, hold = 0.19, period = 40e-3;
    const auto n = static_cast<long long>(std::llround(0.85 * kRate));
    for (long long i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / kRate;
        double f = 0.05, v = 0.0;
        if (t >= pre && t < pre + hold) {
            v = 300.0;
            f = 0.05 + 0.05 * std::fmod(t - pre, period) / period;
        } else if (t >= pre + hold) {
            // linear unload back to the baseline once the drive is off
            const double f_off = 0.05 + 0.05 * std::fmod(hold, period) / period;
            f = std::max(0.05, f_off - 50.0 * (t - pre - hold));
        }
        tw.add(t, f, v);
    }
    return tw.os.str();
}

void put(const fs::path& p, const std::string& s) {
    io::write_file(p.string(), s);
    std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <data dir>\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir / "traces");
    const ClutchConfig nominal;

    {  // permittivity spectrum, 2 % multiplicative scatter
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::ostringstream os;
        io::CsvWriter w(os, {"frequency_hz", "kappa_real"});
        for (int i = 0; i <= 32; ++i) {
            const double f = 100.0 * std::pow(10.0, i / 8.0);  // 100 Hz .. 1 MHz
            const double k = cole_cole_kappa(nominal.dielectric, 2.0 * kPi * f).real();
            w.row(std::vector<double>{f, k * (1.0 + 0.02 * n01(rng))});
        }
        put(dir / "permittivity.csv", os.str());
    }
    {  // capacitance vs normal load, 1 % scatter
        std::mt19937_64 rng(5);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::ostringstream os;
        io::CsvWriter w(os, {"normal_force_n", "capacitance_f"});
        for (int i = 0; i <= 20; ++i) {
            const double load = 0.02 * std::pow(250.0, i / 20.0);  // 0.02 .. 5 N
            const double gap = gap_for_load(nominal, load);
            const double cap = capacitance_ice(nominal.geometry, nominal.dielectric.kappa_s, gap);
            w.row(std::vector<double>{load, cap * (1.0 + 0.01 * n01(rng))});
        }
        put(dir / "calibration.csv", os.str());
    }
    {  // capacity vs frequency at four voltages under the linear multiplier law
        std::ostringstream os;
        io::CsvWriter w(os, {"voltage_v", "frequency_hz", "capacity_n"});
        BodeOptions bo;
        bo.quasi_static = true;
        const std::vector<double> freqs{10.0, 100.0, 1e3, 3e3, 10e3};
        for (double v : {150.0, 200.0, 250.0, 300.0}) {
            ClutchConfig c = nominal;
            c.drive.amplitude = v;
            const BodeResult r = capacity_vs_frequency(c, freqs, bo);
            for (const auto& p : r.points) w.row(std::vector<double>{v, p.frequency, p.capacity});
        }
        put(dir / "capacity_vs_frequency.csv", os.str());
    }
    {  // shear capacity vs voltage, F = c V^1.605 with 1 % scatter
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n01(0.0, 1.0);
        std::ostringstream os;
        io::CsvWriter w(os, {"voltage_v", "force_n"});
        for (double v = 100.0; v <= 300.0; v += 25.0)
            w.row(std::vector<double>{v, 2.0e-5 * std::pow(v, 1.605) * (1.0 + 0.01 * n01(rng))});
        put(dir / "force_vs_voltage.csv", os.str());
    }
    // sample run: engagement 2.6 us, 90 % release 1.49 ms
    put(dir / "traces" / "sample_run.csv", clutch_trace(0.05, 0.2, 0.6, 2.6e-6, 1.49e-3, 2e-4, 11));
    // noiseless planted ramp (engagement 0.5 ms) and step release (2 ms)
    {
        TraceWriter tw;
        const auto n = static_cast<long long>(std::llround(0.75 * kRate));
        for (long long i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) / kRate;
            const bool on = t >= 0.05 && t < 0.15;
            double f = 0.05;
            if (on && t > 0.05 + 0.5e-3) f += 1.0 * (t - 0.05 - 0.5e-3);
            if (t >= 0.15 + 2e-3) f = 0.04;
            else if (t >= 0.15) f = 0.05 + 1.0 * (0.1 - 0.5e-3);
            tw.add(t, f, on ? 250.0 : 0.0);
        }
        put(dir / "traces" / "planted_ramp_step.csv", tw.os.str());
    }
    put(dir / "traces" / "sawtooth.csv", sawtooth_trace());
    return 0;
}
