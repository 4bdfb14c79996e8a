#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eaclutch/contact.hpp"
#include "eaclutch/errors.hpp"
#include "oracles/reference_values.hpp"

using namespace eaclutch;

namespace {

struct McEstimate {
    double mean, se;
};

// Monte Carlo over the Gaussian gap distribution, fixed seed.
template <class F>
McEstimate gaussian_mc(F&& f, double mean, double sigma, unsigned seed, int n = 1000000) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = f(mean + sigma * n01(rng));
        s += v;
        s2 += v * v;
    }
    const double m = s / n;
    return {m, std::sqrt(std::max(0.0, s2 / n - m * m) / n)};
}

}  // namespace

TEST_SUITE("contact") {

TEST_CASE("load integral against the high-precision oracle") {
    for (const auto& r : oracle::kG32) {
        INFO("h=" << r.h);
        CHECK(g_three_halves(r.h) == doctest::Approx(r.value).epsilon(1e-8));
    }
    CHECK(g_three_halves(0.0) == doctest::Approx(0.43001999366225976769).epsilon(1e-14));
    // deep interpenetration: E[(s - h)^1.5] -> |h|^1.5 (1 + 3 / (8 h^2))
    const double h = -50.0;
    CHECK(g_three_halves(h) == doctest::Approx(std::pow(-h, 1.5) * (1 + 3.0 / (8 * h * h))).epsilon(1e-6));
    // continuous across zero where the two branches meet
    CHECK(g_three_halves(-1e-9) == doctest::Approx(g_three_halves(1e-9)).epsilon(1e-7));
}

TEST_CASE("load falls monotonically as the gap opens") {
    const ContactModel m;
    double prev = contact_force(-3 * m.sigma_d, m, 55.5e-3, 2e-3);
    for (double h = -2.9; h <= 6.0; h += 0.1) {
        const double f = contact_force(h * m.sigma_d, m, 55.5e-3, 2e-3);
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("averaged EA force against a Monte Carlo oracle") {
    const ClutchGeometry g;
    const ContactModel m;
    const double kappa = 54.2, v = 300.0;
    auto f = [&](double tau) { return ea_normal_force(g, kappa, v, std::max(tau, 0.0)).force; };
    unsigned seed = 101;
    for (double h : {-2.0, 0.0, 1.0, 3.0, 10.0}) {
        const double t = h * m.sigma_d;
        const McEstimate mc = gaussian_mc(f, t, m.sigma_d, seed++);
        const double got = averaged_ea_force(t, g, kappa, v, m);
        INFO("h=" << h << " mc=" << mc.mean << " se=" << mc.se);
        CHECK(std::abs(got - mc.mean) < 5 * mc.se + 1e-12 * mc.mean);
    }
}

TEST_CASE("averaged damping against a Monte Carlo oracle") {
    const ContactModel m;
    const RoughnessAveraging avg;
    const double L = 55.5e-3, w = 2e-3;
    const double floor_b = squeeze_film_damping_coeff(avg.damping_floor, L, w);
    auto b = [&](double tau) {
        if (tau < 0.0) return 0.0;
        return tau < avg.damping_floor ? floor_b : squeeze_film_damping_coeff(tau, L, w);
    };
    unsigned seed = 201;
    for (double h : {-1.0, 0.0, 0.5, 2.0, 5.0}) {
        const double t = h * m.sigma_d;
        const McEstimate mc = gaussian_mc(b, t, m.sigma_d, seed++);
        const double got = averaged_damping_coeff(t, m, L, w, {}, avg);
        INFO("h=" << h << " mc=" << mc.mean << " se=" << mc.se);
        CHECK(std::abs(got - mc.mean) < 5 * mc.se);
    }
    CHECK(averaged_damping_force(1e-5, 2.0, m, L, w) == doctest::Approx(-2.0 * averaged_damping_coeff(1e-5, m, L, w)));
}

TEST_CASE("averaging reduces to the point value for a smooth surface") {
    const ClutchGeometry g;
    ContactModel m;
    m.sigma_d = 1e-12;
    for (double t : {1e-7, 2e-6, 3e-5})
        CHECK(averaged_ea_force(t, g, 54.2, 250.0, m) == doctest::Approx(ea_normal_force(g, 54.2, 250.0, t).force).epsilon(1e-6));
    CHECK(averaged_damping_coeff(5e-6, m, 55.5e-3, 2e-3) == doctest::Approx(squeeze_film_damping_coeff(5e-6, 55.5e-3, 2e-3)).epsilon(1e-6));
}

TEST_CASE("far from contact the averaged damping follows its moment expansion") {
    // E[1/tau^3] = T^-3 (1 + 6 s^2 / T^2 + 45 s^4 / T^4 + ...)
    const ContactModel m;
    const double L = 55.5e-3, w = 2e-3;
    for (double h : {15.0, 25.0}) {
        const double t = h * m.sigma_d;
        const double expect = squeeze_film_damping_coeff(t, L, w) * (1 + 6 / (h * h) + 45 / std::pow(h, 4));
        RoughnessAveraging wide;
        wide.truncation_sigmas = 8.0;
        CHECK(averaged_damping_coeff(t, m, L, w, {}, wide) == doctest::Approx(expect).epsilon(2e-4));
    }
}

TEST_CASE("squeeze-film coefficient scaling") {
    const double b1 = squeeze_film_damping_coeff(1e-6, 55.5e-3, 2e-3);
    CHECK(squeeze_film_damping_coeff(2e-6, 55.5e-3, 2e-3) == doctest::Approx(b1 / 8));
    // the short side enters cubed, whichever argument it is
    CHECK(squeeze_film_damping_coeff(1e-6, 2e-3, 55.5e-3) == doctest::Approx(b1));
    CHECK_THROWS_AS(squeeze_film_damping_coeff(0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("contact fit recovers the model from noiseless calibration data") {
    const ClutchGeometry g;
    const ContactModel truth;
    const double kappa = 54.2;
    std::vector<CalibrationPoint> data;
    for (int i = 0; i <= 12; ++i) {
        const double load = 0.02 * std::pow(250.0, i / 12.0);
        double lo = -5 * truth.sigma_d, hi = 20 * truth.sigma_d;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (contact_force(mid, truth, g.substrate_overlap_length, g.substrate_width) > load ? lo : hi) = mid;
        }
        data.push_back({load, capacitance_ice(g, kappa, 0.5 * (lo + hi))});
    }
    const ContactFit fit = fit_contact_model(data, g, kappa);
    CHECK(fit.model.stiffness_k == doctest::Approx(truth.stiffness_k).epsilon(1e-5));
    CHECK(fit.model.sigma_d == doctest::Approx(truth.sigma_d).epsilon(1e-5));
    CHECK_FALSE(fit.non_monotone_gaps);
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(fit.predicted_capacitance[i] == doctest::Approx(data[i].capacitance).epsilon(1e-5));

    std::vector<CalibrationPoint> one{data[0]};
    CHECK_THROWS_AS(fit_contact_model(one, g, kappa), InsufficientData);
}

}  // TEST_SUITE
