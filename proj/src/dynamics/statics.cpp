#include "eaclutch/dynamics/statics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "eaclutch/errors.hpp"

namespace eaclutch {

namespace {

// Plain bisection; f(lo) and f(hi) must differ in sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double lambda_ea(double v, const LambdaModel& law) {
    switch (law.law) {
        case LambdaLaw::unity: return 1.0;
        case LambdaLaw::fixed: return std::max(0.0, law.fixed_value);
        case LambdaLaw::linear: return std::max(0.0, law.intercept + law.slope * std::abs(v));
    }
    return 1.0;
}

GapForces gap_forces(const ClutchConfig& c, double t_air, double tdot, double kappa, double v) {
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    GapForces f;
    f.contact = contact_force(t_air, c.contact, L, w);
    f.damping = averaged_damping_force(t_air, tdot, c.contact, L, w, c.air, c.averaging);
    f.ea = v == 0.0 ? 0.0 : averaged_ea_force(t_air, c.geometry, kappa, v, c.contact, c.averaging);
    f.lambda = lambda_ea(c.lambda.instantaneous ? v : c.drive.amplitude, c.lambda);
    const double md = c.dielectric_mass(), ms = c.substrate_mass();
    f.acceleration = (f.contact + f.damping - f.lambda * f.ea - md * c.gravity - c.f_preload) / md;
    const double nb = f.contact + f.damping - f.lambda * f.ea + ms * c.gravity;
    f.lifted_off = nb < 0.0;
    f.normal_base = std::max(0.0, nb);
    return f;
}

std::array<double, 2> gap_dynamics_rhs(std::array<double, 2> state, double t, const ClutchConfig& c) {
    const double v = drive_voltage(c.drive, t);
    const double kappa = effective_kappa(c.dielectric, c.drive, t);
    const GapForces f = gap_forces(c, state[0], state[1], kappa, v);
    return {state[1], f.acceleration};
}

double equilibrium_gap(const ClutchConfig& c, double v, double from_gap) {
    const double s = c.contact.sigma_d;
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    const double load = c.dielectric_mass() * c.gravity + c.f_preload;

    auto unloaded = [&](double t) { return contact_force(t, c.contact, L, w) - load; };
    // F_k is decreasing in the gap, so the v = 0 root is unique
    double lo = 0.0, hi = 20.0 * s;
    double flo = unloaded(lo);
    if (unloaded(hi) > 0.0) throw NoEquilibrium("equilibrium_gap: contact force still exceeds the load at 20 sigma_d");
    while (flo < 0.0) {
        hi = lo;
        lo = lo == 0.0 ? -s : 2.0 * lo;
        if (lo < -1e4 * s) throw NoEquilibrium("equilibrium_gap: no compression-regime root for this preload");
        flo = unloaded(lo);
    }
    const double t0 = bisect(unloaded, lo, hi, flo);
    if (v == 0.0) return t0;

    const double lam = lambda_ea(v, c.lambda);
    auto balance = [&](double t) {
        return contact_force(t, c.contact, L, w) -
               lam * averaged_ea_force(t, c.geometry, c.dielectric.kappa_s, v, c.contact, c.averaging) - load;
    };
    double a = std::isnan(from_gap) ? t0 : from_gap;
    double fa = balance(a);
    if (fa == 0.0) return a;
    // walk toward the root in small steps so the first crossing is the one reached
    const double dir = fa < 0.0 ? -1.0 : 1.0;
    double step = s / 50.0;
    for (int i = 0; i < 100000; ++i) {
        const double b = a + dir * step;
        const double fb = balance(b);
        if ((fb < 0.0) != (fa < 0.0) || fb == 0.0) {
            return dir < 0.0 ? bisect(balance, b, a, fb) : bisect(balance, a, b, fa);
        }
        a = b;
        fa = fb;
        if (a < -20.0 * s) step *= 1.1;  // deep compression: contact force grows without bound
        if (a > t0 + 20.0 * s) break;
    }
    throw NoEquilibrium("equilibrium_gap: lost the static root (pull-in without a compression root)");
}

double shear_force(const ClutchConfig& c, double normal_base, double contact, bool moving) {
    const double mb = moving ? c.mu_base_kinetic : c.mu_base_static;
    const double md = moving ? c.mu_d_kinetic : c.mu_d_static;
    return mb * normal_base + md * contact;
}

double shear_capacity(const ClutchConfig& c, double t_air_settled) {
    const double w = (c.dielectric_mass() + c.substrate_mass()) * c.gravity + c.f_preload;
    const double fk = contact_force(t_air_settled, c.contact, c.geometry.substrate_overlap_length,
                                    c.geometry.substrate_width);
    return c.mu_base_static * w + c.mu_d_static * fk;
}

PreloadEstimate preload_from_baseline(double f_shear_v0, const ClutchConfig& c) {
    const double den = c.mu_d_kinetic + c.mu_base_kinetic;
    if (!(den > 0.0)) throw DomainError("preload_from_baseline: mu_d + mu_base must be > 0");
    const double num = f_shear_v0 - c.mu_base_kinetic * c.substrate_mass() * c.gravity -
                       c.mu_d_kinetic * c.dielectric_mass() * c.gravity;
    PreloadEstimate out;
    out.value = num / den;
    if (out.value < 0.0) {
        out.value = 0.0;
        out.clamped = true;
    }
    return out;
}

}  // namespace eaclutch
