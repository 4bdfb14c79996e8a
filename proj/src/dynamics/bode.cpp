#include "eaclutch/dynamics/bode.hpp"

#include <algorithm>
#include <cmath>

#include "eaclutch/dynamics/simulate.hpp"
#include "eaclutch/dynamics/statics.hpp"
#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/least_squares.hpp"
#include "eaclutch/numerics/ode.hpp"

namespace eaclutch {

namespace {

struct PeriodSamples {
    std::vector<double> t, v, kappa;
};

// Gap where contact balances the period-averaged EA pull, walking down from
// the unloaded gap as the static solver does.
double averaged_balance_gap(const ClutchConfig& c, const PeriodSamples& ps, double start) {
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    const double load = c.dielectric_mass() * c.gravity + c.f_preload;
    const double lam = lambda_ea(c.drive.amplitude, c.lambda);
    auto f = [&](double t) {
        double ea = 0.0;
        for (std::size_t j = 0; j < ps.t.size(); ++j)
            if (ps.v[j] != 0.0) ea += averaged_ea_force(t, c.geometry, ps.kappa[j], ps.v[j], c.contact, c.averaging);
        ea /= static_cast<double>(ps.t.size());
        return contact_force(t, c.contact, L, w) - lam * ea - load;
    };
    const double s = c.contact.sigma_d;
    double a = start, fa = f(a);
    const double dir = fa < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < 4000; ++i) {
        const double b = a + dir * s / 20.0;
        const double fb = f(b);
        if ((fb < 0.0) != (fa < 0.0)) {
            double lo = std::min(a, b), hi = std::max(a, b);
            double flo = dir < 0.0 ? fb : fa;
            for (int it = 0; it < 100 && hi - lo > 1e-10 * s; ++it) {
                const double m = 0.5 * (lo + hi), fm = f(m);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        fa = fb;
    }
    throw NoEquilibrium("capacity_vs_frequency: no averaged balance gap");
}

}  // namespace

double minus_3db_frequency(double dc_capacity, std::span<const CapacityPoint> points) {
    const double level = dc_capacity / std::sqrt(2.0);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double c0 = points[i].capacity, c1 = points[i + 1].capacity;
        if (c0 >= level && c1 < level) {
            const double l0 = std::log(points[i].frequency), l1 = std::log(points[i + 1].frequency);
            const double d0 = 20.0 * std::log10(c0 / dc_capacity), d1 = 20.0 * std::log10(c1 / dc_capacity);
            const double target = 20.0 * std::log10(1.0 / std::sqrt(2.0));
            return std::exp(l0 + (target - d0) / (d1 - d0) * (l1 - l0));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

BodeResult capacity_vs_frequency(const ClutchConfig& c, std::span<const double> freqs, const BodeOptions& opt) {
    c.validate();
    BodeResult out;
    const double gap_v0 = equilibrium_gap(c, 0.0);
    out.dc_capacity = shear_capacity(c, equilibrium_gap(c, c.drive.amplitude, gap_v0));
    auto kernel = opt.kernel ? opt.kernel : relaxation_kernel_for(c.dielectric.alpha);
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    const int ns = std::max(8, opt.samples_per_period);

    for (double f : freqs) {
        if (!(f > 0.0)) throw DomainError("capacity_vs_frequency: frequencies must be > 0");
        ClutchConfig cf = c;
        cf.drive.waveform = Waveform::bipolar_square;
        cf.drive.frequency = f;
        const DrivenDielectric diel(cf.dielectric, DriveWaveform(cf.drive), kernel);
        const double period = 1.0 / f;
        // start of a late period, long after switch-on
        const double t_ss = std::max(std::round(c.hold_time * f), 20.0) * period;

        PeriodSamples ps;
        for (int j = 0; j < ns; ++j) {
            const double t = t_ss + (j + 0.5) * period / ns;
            ps.t.push_back(t);
            ps.v.push_back(diel.voltage(t));
            ps.kappa.push_back(diel.kappa(t));
        }
        CapacityPoint pt;
        pt.frequency = f;
        const double gap_qs = averaged_balance_gap(cf, ps, gap_v0);
        const double lam = lambda_ea(cf.drive.amplitude, cf.lambda);

        if (opt.quasi_static) {
            pt.mean_gap = gap_qs;
            pt.mean_contact = contact_force(gap_qs, cf.contact, L, w);
            pt.mean_ea = pt.mean_contact - cf.dielectric_mass() * cf.gravity - cf.f_preload;
        } else {
            std::vector<double> y{gap_qs, 0.0};
            double t0 = t_ss, prev = std::numeric_limits<double>::quiet_NaN();
            pt.settled = false;
            for (int k = 0; k < opt.max_periods; ++k) {
                OdeProblem p;
                p.rhs = [&](double t, std::span<const double> z, std::span<double> dz) {
                    const GapForces g = gap_forces(cf, z[0], z[1], diel.kappa(t), diel.voltage(t));
                    dz[0] = z[1];
                    dz[1] = g.acceleration;
                };
                p.initial_state = y;
                p.t0 = t0;
                p.t_end = t0 + period;
                p.breakpoints = diel.waveform().edges(t0, t0 + period);
                p.initial_step = 1e-9;
                p.state_scale = {cf.contact.sigma_d, 1e-3};
                const OdeSolution sol = solve_ivp(p, opt.tol);
                double fk = 0.0, gap = 0.0, ea = 0.0;
                for (int j = 0; j < ns; ++j) {
                    const double t = t0 + (j + 0.5) * period / ns;
                    const auto z = sol.at(t);
                    const GapForces g = gap_forces(cf, z[0], z[1], diel.kappa(t), diel.voltage(t));
                    fk += g.contact;
                    gap += z[0];
                    ea += lam * g.ea;
                }
                pt.mean_contact = fk / ns;
                pt.mean_gap = gap / ns;
                pt.mean_ea = ea / ns;
                pt.periods = k + 1;
                y = sol.y.back();
                t0 = t_ss + (k + 1) * period;
                if (!std::isnan(prev) && std::abs(pt.mean_contact - prev) <= opt.settle_rel * std::abs(prev)) {
                    pt.settled = true;
                    break;
                }
                prev = pt.mean_contact;
            }
            if (!pt.settled)
                out.warnings.push_back("gap did not settle at " + std::to_string(f) + " Hz; using the last period");
        }
        const double wb = (cf.dielectric_mass() + cf.substrate_mass()) * cf.gravity + cf.f_preload;
        pt.capacity = cf.mu_base_static * wb + cf.mu_d_static * pt.mean_contact;
        out.points.push_back(pt);
    }
    out.f_3db = minus_3db_frequency(out.dc_capacity, out.points);
    return out;
}

LambdaFit fit_lambda_law(const ClutchConfig& c, std::span<const CapacityObservation> data, const BodeOptions& opt) {
    if (data.empty()) throw InsufficientData("fit_lambda_law: no observations");
    LambdaFit out;
    for (const auto& d : data) {
        if (!(d.voltage > 0.0) || !(d.frequency > 0.0) || !(d.capacity > 0.0))
            throw DomainError("fit_lambda_law: voltage, frequency and capacity must be > 0");
        if (std::find(out.voltages.begin(), out.voltages.end(), d.voltage) == out.voltages.end())
            out.voltages.push_back(d.voltage);
    }
    std::sort(out.voltages.begin(), out.voltages.end());
    BodeOptions o = opt;
    if (!o.kernel) o.kernel = relaxation_kernel_for(c.dielectric.alpha);

    double sse = 0.0;
    for (double v : out.voltages) {
        std::vector<double> freqs, meas;
        for (const auto& d : data) {
            if (d.voltage == v) {
                freqs.push_back(d.frequency);
                meas.push_back(d.capacity);
            }
        }
        ClutchConfig cv = c;
        cv.drive.amplitude = v;
        cv.lambda.law = LambdaLaw::fixed;
        auto resid = [&](std::span<const double> p, std::span<double> r) {
            cv.lambda.fixed_value = p[0];
            const BodeResult b = capacity_vs_frequency(cv, freqs, o);
            for (std::size_t i = 0; i < freqs.size(); ++i) r[i] = b.points[i].capacity - meas[i];
        };
        const FitResult fr = fit_residuals(resid, freqs.size(), {1.0}, {ParamBounds{0.0, 1e3}});
        out.lambdas.push_back(fr.params[0]);
        out.se_lambdas.push_back(fr.std_errors.empty() ? 0.0 : fr.std_errors[0]);
        sse += fr.residual_norm * fr.residual_norm;
    }
    out.residual_norm = std::sqrt(sse);

    const double n = static_cast<double>(out.voltages.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < out.voltages.size(); ++i) {
        mx += out.voltages[i];
        my += out.lambdas[i];
    }
    mx /= n;
    my /= n;
    out.mean = my;
    out.intercept = my;
    if (out.voltages.size() >= 2) {
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < out.voltages.size(); ++i) {
            sxx += (out.voltages[i] - mx) * (out.voltages[i] - mx);
            sxy += (out.voltages[i] - mx) * (out.lambdas[i] - my);
            syy += (out.lambdas[i] - my) * (out.lambdas[i] - my);
        }
        out.slope = sxy / sxx;
        out.intercept = my - out.slope * mx;
        out.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    }
    return out;
}

}  // namespace eaclutch
