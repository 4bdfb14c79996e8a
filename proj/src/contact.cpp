#include "eaclutch/contact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/least_squares.hpp"
#include "eaclutch/numerics/quadrature.hpp"
#include "eaclutch/numerics/special.hpp"

namespace eaclutch {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
// 2^{1/4} Gamma(5/4) / sqrt(2 pi)
const double kG0 = std::pow(2.0, 0.25) * std::tgamma(1.25) * kInvSqrt2Pi;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Integral of f(tau) N(tau; mean, sigma) over [lo, hi] (already truncated).
template <class F>
double gaussian_weighted(F&& f, double mean, double sigma, double lo, double hi,
                         std::span<const double> extra_points = {}) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> pts{lo};
    for (double p : extra_points)
        if (p > lo && p < hi) pts.push_back(p);
    if (mean > lo && mean < hi) pts.push_back(mean);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto integrand = [&](double tau) { return f(tau) * normal_pdf((tau - mean) / sigma) / sigma; };
    return integrate_adaptive(integrand, pts, kKernelTolerance).value;
}

}  // namespace

void ContactModel::validate() const {
    if (!(stiffness_k > 0.0) || !std::isfinite(stiffness_k)) throw ConfigError("contact.stiffness_k", "must be > 0");
    if (!(sigma_d > 0.0) || !std::isfinite(sigma_d)) throw ConfigError("contact.sigma_d", "must be > 0");
}

void RoughnessAveraging::validate() const {
    if (!(truncation_sigmas > 0.0)) throw ConfigError("averaging.truncation_sigmas", "must be > 0");
    if (!(damping_floor > 0.0)) throw ConfigError("averaging.damping_floor", "must be > 0");
}

double g_three_halves(double h) {
    if (std::isnan(h)) throw DomainError("g_three_halves: NaN");
    if (h < 0.0) {
        // defining integral; the closed form's sqrt(h) has no meaning here
        auto f = [h](double s) { return std::pow(s - h, 1.5) * normal_pdf(s); };
        const std::array<double, 4> pts{h, 0.0, std::max(0.0, -h) + 8.0, std::numeric_limits<double>::infinity()};
        std::array<double, 4> p = pts;
        if (p[1] <= p[0]) p[1] = 0.5 * (p[0] + p[2]);
        return integrate_adaptive(f, p, Tolerance{1e-13, 0.0, 500}).value;
    }
    const double z = 0.25 * h * h;
    if (z == 0.0) return kG0;
    if (z > 700.0) return 0.0;
    const double k14 = bessel_k(0.25, z);
    const double k34 = bessel_k(0.75, z);
    return std::sqrt(h) * std::exp(-z) / (4.0 * std::sqrt(kPi)) * ((h * h + 1.0) * k14 - h * h * k34);
}

double contact_force(double t_air, const ContactModel& m, double overlap_length, double width) {
    m.validate();
    return m.stiffness_k * overlap_length * width * std::pow(m.sigma_d, 1.5) * g_three_halves(t_air / m.sigma_d);
}

double squeeze_film_damping_coeff(double t_air, double overlap_length, double width, const AirProperties& air) {
    if (!(t_air > 0.0)) throw DomainError("squeeze_film_damping_coeff: gap must be > 0");
    const double lo = std::min(overlap_length, width), hi = std::max(overlap_length, width);
    const double pi4 = kPi * kPi * kPi * kPi;
    return 96.0 * air.viscosity * lo * lo * lo * hi / (pi4 * t_air * t_air * t_air);
}

double averaged_damping_coeff(double t_air, const ContactModel& m, double overlap_length, double width,
                              const AirProperties& air, const RoughnessAveraging& avg) {
    m.validate();
    avg.validate();
    const double s = m.sigma_d, eps = avg.damping_floor, n = avg.truncation_sigmas;
    const double lo = t_air - n * s, hi = t_air + n * s;
    const double b_floor = squeeze_film_damping_coeff(eps, overlap_length, width, air);
    // gaps below zero carry no air film; [0, eps] is clamped to b(eps)
    double below = 0.0;
    if (lo < eps && hi > 0.0) {
        const double from = std::max(lo, 0.0), upper = std::min(eps, hi);
        below = b_floor * (normal_cdf((upper - t_air) / s) - normal_cdf((from - t_air) / s));
    }
    if (hi <= eps) return below;
    const double c = b_floor * eps * eps * eps;  // b(tau) = c / tau^3
    const double start = std::max(lo, eps);
    const std::array<double, 3> extra{2.0 * eps, 4.0 * eps, 16.0 * eps};
    const double above = gaussian_weighted([c](double tau) { return c / (tau * tau * tau); }, t_air, s, start, hi, extra);
    return below + above;
}

double averaged_damping_force(double t_air, double tdot, const ContactModel& m, double overlap_length,
                              double width, const AirProperties& air, const RoughnessAveraging& avg) {
    return -averaged_damping_coeff(t_air, m, overlap_length, width, air, avg) * tdot;
}

double averaged_ea_force(double t_air, const ClutchGeometry& g, double kappa, double v, const ContactModel& m,
                         const RoughnessAveraging& avg) {
    m.validate();
    avg.validate();
    if (!(kappa >= 1.0)) throw DomainError("averaged_ea_force: kappa must be >= 1");
    const double s = m.sigma_d, n = avg.truncation_sigmas;
    const double lo = t_air - n * s, hi = t_air + n * s;
    const double td = g.dielectric_thickness;
    const double pref = 0.5 * kappa * kappa * kEpsilon0 * g.n_electrodes * g.overlap_area() * 0.25 * v * v;
    auto force = [&](double tau) {
        const double d = td + kappa * tau;
        return pref / (d * d);
    };
    double contact_part = 0.0;
    if (lo < 0.0) contact_part = force(0.0) * (normal_cdf((std::min(0.0, hi) - t_air) / s) - normal_cdf(-n));
    if (hi <= 0.0) return contact_part;
    return contact_part + gaussian_weighted(force, t_air, s, std::max(lo, 0.0), hi);
}

ContactFit fit_contact_model(std::span<const CalibrationPoint> data, const ClutchGeometry& g, double kappa) {
    if (data.size() < 2) throw InsufficientData("fit_contact_model: need at least 2 points");
    g.validate();
    ContactFit out;
    std::vector<double> lnF;
    for (const auto& p : data) {
        if (!(p.capacitance > 0.0)) throw DomainError("fit_contact_model: capacitances must be > 0");
        if (!(p.normal_force > 0.0)) throw DomainError("fit_contact_model: forces must be > 0");
        out.gaps.push_back(air_gap_from_capacitance(g, kappa, p.capacitance));
        lnF.push_back(std::log(p.normal_force));
    }
    // gaps should shrink as the load grows
    {
        std::vector<std::size_t> idx(data.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return data[a].normal_force < data[b].normal_force; });
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (out.gaps[idx[i]] > out.gaps[idx[i - 1]]) out.non_monotone_gaps = true;
    }

    const double area = g.substrate_overlap_length * g.substrate_width;
    // ln F = ln k + ln(A sigma^1.5 G(T/sigma))
    auto shape = [&](double sigma, double gap) {
        return std::log(area) + 1.5 * std::log(sigma) + std::log(g_three_halves(gap / sigma));
    };
    // coarse scan in sigma with the optimal ln k in closed form
    double best_cost = std::numeric_limits<double>::infinity(), best_lns = 0.0, best_lnk = 0.0;
    for (int i = 0; i <= 120; ++i) {
        const double lns = std::log(1e-8) + i * (std::log(1e-4) - std::log(1e-8)) / 120.0;
        const double sg = std::exp(lns);
        double mean = 0.0;
        bool ok = true;
        std::vector<double> sh(data.size());
        for (std::size_t j = 0; j < data.size(); ++j) {
            sh[j] = shape(sg, out.gaps[j]);
            if (!std::isfinite(sh[j])) ok = false;
            mean += lnF[j] - sh[j];
        }
        if (!ok) continue;
        mean /= static_cast<double>(data.size());
        double cost = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) cost += std::pow(mean + sh[j] - lnF[j], 2);
        if (cost < best_cost) {
            best_cost = cost;
            best_lns = lns;
            best_lnk = mean;
        }
    }
    if (!std::isfinite(best_cost)) throw DegenerateFit("fit_contact_model: no roughness scale reproduces the loads");

    auto res = [&](std::span<const double> q, std::span<double> r) {
        const double sg = std::exp(q[1]);
        for (std::size_t j = 0; j < data.size(); ++j) r[j] = q[0] + shape(sg, out.gaps[j]) - lnF[j];
    };
    FitResult fr = fit_residuals(res, data.size(), {best_lnk, best_lns}, {{-200.0, 200.0}, {std::log(1e-10), std::log(1e-2)}},
                                 Tolerance{1e-13, 0.0, 500});
    out.model.stiffness_k = std::exp(fr.params[0]);
    out.model.sigma_d = std::exp(fr.params[1]);
    out.se_stiffness_k = out.model.stiffness_k * fr.std_errors[0];
    out.se_sigma_d = out.model.sigma_d * fr.std_errors[1];
    out.residual_norm = fr.residual_norm;

    // invert the fitted load curve for each measured load
    for (const auto& p : data) {
        double a = -8.0 * out.model.sigma_d, b = 30.0 * out.model.sigma_d;
        const double L = g.substrate_overlap_length, w = g.substrate_width;
        if (contact_force(a, out.model, L, w) < p.normal_force) {
            out.predicted_capacitance.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double c = 0.5 * (a + b);
            if (contact_force(c, out.model, L, w) > p.normal_force)
                a = c;
            else
                b = c;
        }
        const double gap = 0.5 * (a + b);
        out.predicted_capacitance.push_back(gap > -g.dielectric_thickness / kappa ? capacitance_ice(g, kappa, gap)
                                                                                : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

}  // namespace eaclutch
