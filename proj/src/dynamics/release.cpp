#include <algorithm>
#include <cmath>

#include "eaclutch/dynamics/simulate.hpp"
#include "eaclutch/dynamics/statics.hpp"
#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/ode.hpp"

namespace eaclutch {

namespace {

constexpr double kStickVelocity = 1e-6;  // m/s
constexpr double kQuietChunk = 1e-3;     // s between permanent-stop checks while stuck

// Instant of voltage-off: the drive has run for about hold_time and is cut a
// quarter period into a positive half cycle, where the output has settled.
double release_instant(const DriveSignal& d, double hold_time) {
    if (d.waveform == Waveform::dc) return hold_time;
    return (std::round(hold_time * d.frequency) + 0.25) / d.frequency;
}

// First time the load-cell deflection falls to `level`, NaN if never.
double first_fall(const std::vector<OdeSolution>& pieces, double level) {
    for (const auto& sol : pieces) {
        for (std::size_t i = 0; i + 1 < sol.t.size(); ++i) {
            if (sol.y[i][2] > level && sol.y[i + 1][2] <= level) {
                double a = sol.t[i], b = sol.t[i + 1];
                for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
                    const double m = 0.5 * (a + b);
                    if (sol.at(m, 2) > level)
                        a = m;
                    else
                        b = m;
                }
                return 0.5 * (a + b);
            }
            if (i == 0 && sol.y[0][2] <= level) return sol.t[0];
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SimResult simulate_release(const ClutchConfig& c, const LoadCellModel& lc, double force_ratio, const SimOptions& opt) {
    c.validate();
    lc.validate();
    if (!(force_ratio > 0.0 && force_ratio <= 1.0)) throw DomainError("simulate_release: force_ratio must be in (0, 1]");
    const double t_max = std::isnan(opt.t_max) ? 0.5 : opt.t_max;
    const double amp = c.drive.amplitude;

    SimResult out;
    const double gap_v0 = equilibrium_gap(c, 0.0);
    out.initial_gap = amp > 0.0 ? equilibrium_gap(c, amp, gap_v0) : gap_v0;
    out.settled_gap = gap_v0;
    out.capacity = shear_capacity(c, out.initial_gap);
    const double x0 = out.capacity / lc.k_lc * force_ratio;

    const double t_off = release_instant(c.drive, c.hold_time);
    auto kernel = opt.kernel ? opt.kernel : relaxation_kernel_for(c.dielectric.alpha);
    const DrivenDielectric diel(c.dielectric, DriveWaveform(c.drive, t_off), kernel);

    // s is time since voltage-off
    auto forces = [&](double s, double gap, double gapdot) {
        return gap_forces(c, gap, gapdot, diel.kappa(t_off + s), diel.voltage(t_off + s));
    };
    auto static_limit = [&](double s, double gap, double gapdot) {
        const GapForces f = forces(s, gap, gapdot);
        return shear_force(c, f.normal_base, f.contact, false);
    };
    // static friction once every electrical transient has gone
    const double final_static = [&] {
        const GapForces f = gap_forces(c, gap_v0, 0.0, c.dielectric.kappa_inf, 0.0);
        return shear_force(c, f.normal_base, f.contact, false);
    }();

    std::vector<double> y{out.initial_gap, 0.0, x0, 0.0};
    std::vector<OdeSolution> pieces;
    double s = 0.0;
    bool stuck = true;
    double dir = 0.0;  // sliding direction of the load cell
    out.reason = Termination::time_limit;

    const std::vector<double> scale{c.contact.sigma_d, 1e-3, x0, 1e-2};

    while (s < t_max) {
        OdeProblem p;
        p.initial_state = y;
        p.t0 = s;
        p.initial_step = 1e-9;
        p.state_scale = scale;

        if (stuck) {
            const double load = lc.k_lc * std::abs(y[2]);
            if (load > static_limit(s, y[0], y[1])) {
                stuck = false;
                dir = y[2] > 0.0 ? -1.0 : 1.0;
                continue;
            }
            p.t_end = std::min(t_max, s + kQuietChunk);
            p.rhs = [&](double t, std::span<const double> z, std::span<double> dz) {
                dz[0] = z[1];
                dz[1] = forces(t, z[0], z[1]).acceleration;
                dz[2] = 0.0;
                dz[3] = 0.0;
            };
            p.events.push_back({[&, load](double t, std::span<const double> z) {
                                    return load - static_limit(t, z[0], z[1]);
                                },
                                1, true, "unstick"});
            pieces.push_back(solve_ivp(p, opt.tol));
            const OdeSolution& sol = pieces.back();
            y = sol.y.back();
            s = sol.t.back();
            if (sol.terminal_event()) {
                stuck = false;
                dir = y[2] > 0.0 ? -1.0 : 1.0;
                continue;
            }
            // with the drive gone the gap only reopens, so static friction only
            // falls toward final_static; below that the load cell never moves again
            const bool quiet = std::abs(diel.voltage(t_off + s)) < 1e-6 * amp && y[1] >= 0.0;
            if (quiet && lc.k_lc * std::abs(y[2]) <= final_static) {
                out.reason = Termination::motion_ceased;
                break;
            }
            continue;
        }

        p.t_end = t_max;
        p.rhs = [&, dir](double t, std::span<const double> z, std::span<double> dz) {
            const GapForces f = forces(t, z[0], z[1]);
            const double kin = shear_force(c, f.normal_base, f.contact, true);
            dz[0] = z[1];
            dz[1] = f.acceleration;
            dz[2] = z[3];
            dz[3] = (-lc.k_lc * z[2] - lc.b_lc * z[3] - kin * dir) / lc.m_lc;
        };
        // velocity returns to zero: re-stick or reverse
        p.events.push_back({[](double, std::span<const double> z) { return z[3]; }, dir < 0.0 ? 1 : -1, true,
                            "velocity_zero"});
        p.events.push_back({[](double, std::span<const double> z) { return z[2]; }, y[2] > 0.0 ? -1 : 1, true,
                            "origin"});
        pieces.push_back(solve_ivp(p, opt.tol));
        const OdeSolution& sol = pieces.back();
        y = sol.y.back();
        s = sol.t.back();
        const EventHit* hit = sol.terminal_event();
        if (!hit) break;  // t_max
        if (hit->index == 1) {
            out.reason = Termination::returned_to_zero;
            y[2] = 0.0;
            break;
        }
        stuck = std::abs(y[3]) < kStickVelocity &&
                std::abs(lc.k_lc * y[2] + lc.b_lc * y[3]) <= static_limit(s, y[0], y[1]);
        y[3] = 0.0;
        if (!stuck) dir = y[2] > 0.0 ? -1.0 : 1.0;
    }

    double x_final = y[2];
    if (out.reason == Termination::returned_to_zero) x_final = 0.0;
    if (out.reason == Termination::time_limit) out.warnings.push_back("load cell still moving at t_max");
    const double thr = c.release_threshold;
    out.time = first_fall(pieces, x0 - thr * (x0 - x_final));
    out.time_alt = first_fall(pieces, x0 - (1.0 - thr) * (x0 - x_final));
    if (std::isnan(out.time)) out.warnings.push_back("load-cell force never crossed the release threshold");

    if (opt.record_trace) {
        SimTrace& tr = out.trace;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const OdeSolution& sol = pieces[k];
            const bool moving = sol.y.size() > 1 && sol.y.back()[2] != sol.y.front()[2];
            for (std::size_t i = 0; i < sol.t.size(); ++i) {
                if (!tr.t.empty() && sol.t[i] <= tr.t.back()) continue;
                const double t = sol.t[i];
                const GapForces f = forces(t, sol.y[i][0], sol.y[i][1]);
                tr.t.push_back(t);
                tr.gap.push_back(sol.y[i][0]);
                tr.gap_velocity.push_back(sol.y[i][1]);
                tr.shear.push_back(shear_force(c, f.normal_base, f.contact, moving));
                tr.voltage.push_back(diel.voltage(t_off + t));
                tr.kappa.push_back(diel.kappa(t_off + t));
                tr.loadcell_x.push_back(sol.y[i][2]);
            }
        }
    }
    return out;
}

}  // namespace eaclutch
