#include <doctest.h>

#include <cmath>
#include <vector>

#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/constants.hpp"
#include "eaclutch/polarization.hpp"
#include "oracles/reference_values.hpp"

using namespace eaclutch;

namespace {

// Polarization by summing every ideal edge of the drive directly.
double brute_polarization(const DielectricModel& m, double freq, bool bipolar, double t_off, double t) {
    if (t <= 0.0) return 0.0;
    struct Edge { double t, jump; };
    std::vector<Edge> edges{{0.0, 1.0}};
    double level = 1.0;
    if (bipolar) {
        const double h = 0.5 / freq;
        for (int k = 1; k * h < t_off && k * h <= t; ++k) {
            edges.push_back({k * h, -2.0 * level});
            level = -level;
        }
    }
    if (t >= t_off) edges.push_back({t_off, -level});
    double p = 0.0;
    for (const auto& e : edges)
        if (t > e.t) p += e.jump * relaxation_fraction(m.alpha, (t - e.t) / m.tau);
    return p;
}

}  // namespace

TEST_SUITE("polarization") {

TEST_CASE("complex permittivity limits and the Debye case") {
    DielectricModel m;
    CHECK(cole_cole_kappa(m, 0.0).real() == m.kappa_s);
    CHECK(cole_cole_kappa(m, 1e15).real() == doctest::Approx(m.kappa_inf).epsilon(1e-3));
    m.alpha = 1.0;
    const double w = 1.0 / m.tau;
    // Debye at omega tau = 1: half way, loss peak of (ks - ki)/2
    CHECK(cole_cole_kappa(m, w).real() == doctest::Approx(0.5 * (m.kappa_s + m.kappa_inf)));
    CHECK(cole_cole_kappa(m, w).imag() == doctest::Approx(-0.5 * (m.kappa_s - m.kappa_inf)));
    CHECK_THROWS_AS(cole_cole_kappa(m, -1.0), DomainError);
}

TEST_CASE("step relaxation against the inverse Laplace oracle") {
    for (const auto& r : oracle::kRelaxTalbot) {
        INFO("alpha=" << r.alpha << " x=" << r.x);
        CHECK(relaxation_fraction(r.alpha, r.x) == doctest::Approx(r.value).epsilon(1e-10));
    }
    for (double x : {0.01, 0.5, 3.0, 20.0}) CHECK(relaxation_fraction(1.0, x) == doctest::Approx(-std::expm1(-x)));
    CHECK(relaxation_fraction(0.562, 0.0) == 0.0);
    CHECK_THROWS_AS(relaxation_fraction(0.562, -1.0), DomainError);
}

TEST_CASE("nominal dielectric reaches 93 percent of its swing 100 us after a step") {
    const DielectricModel m;
    const double frac = (cole_cole_step_response(m, 100e-6) - m.kappa_inf) / (m.kappa_s - m.kappa_inf);
    CHECK(frac == doctest::Approx(0.932).epsilon(0.005));
}

TEST_CASE("tabulated kernel agrees with the direct evaluation") {
    for (double a : {0.3, 0.562, 1.0}) {
        const RelaxationKernel k(a);
        double worst = 0.0;
        for (double lx = -9.0; lx <= 9.0; lx += 0.0137) {
            const double x = std::pow(10.0, lx);
            worst = std::max(worst, std::abs(k.fraction(x) - relaxation_fraction(a, x)));
        }
        INFO("alpha=" << a);
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("edge superposition matches the brute-force sum over all edges") {
    const DielectricModel m;
    DriveSignal s;
    for (bool bipolar : {true, false}) {
        s.waveform = bipolar ? Waveform::bipolar_square : Waveform::dc;
        const double t_off = 7.25e-3;
        const DriveWaveform w(s, t_off);
        const DrivenDielectric d(m, w);
        for (double t : {1e-7, 3e-5, 4.9e-4, 5.1e-4, 2.3e-3, 7.0e-3, 7.26e-3, 8e-3, 12e-3, 40e-3}) {
            const double ref = brute_polarization(m, s.frequency, bipolar, t_off, t);
            INFO("bipolar=" << bipolar << " t=" << t);
            CHECK(polarization_exact(m, w, t) == doctest::Approx(ref).scale(1).epsilon(1e-6));
            CHECK(std::abs(d.polarization(t) - ref) < 1e-6);
        }
    }
}

TEST_CASE("long bipolar drive stays bounded and periodic") {
    const DielectricModel m;
    const DriveSignal s;
    const DrivenDielectric d(m, DriveWaveform(s));
    // one full period apart late in the drive
    for (double t : {0.2001, 0.3504}) CHECK(d.polarization(t) == doctest::Approx(d.polarization(t + 1e-3)).epsilon(1e-4));
    for (double t = 0.0; t < 0.01; t += 1.7e-5) {
        const double k = d.kappa(t);
        CHECK(k >= m.kappa_inf);
        CHECK(k <= m.kappa_s);
    }
}

TEST_CASE("filtered drive voltage") {
    DriveSignal s;
    s.waveform = Waveform::dc;
    // 10-90 rise of the first-order filter
    const double t10 = s.tau_rise * std::log(10.0 / 9.0), t90 = s.tau_rise * std::log(10.0);
    CHECK(t90 - t10 == doctest::Approx(8.3e-6));
    CHECK(drive_voltage(s, t90) == doctest::Approx(0.9 * s.amplitude));
    CHECK(DriveSignal::tau_from_transition(5.2e-6) == doctest::Approx(s.tau_fall));

    // bipolar: the steady-state shortcut agrees with stepping every half period
    s.waveform = Waveform::bipolar_square;
    s.frequency = 20e3;
    const DriveWaveform w(s);
    const double h = w.half_period();
    double v = 0.0;
    const int K = 400;
    for (int j = 0; j < K; ++j) {
        const double target = (j % 2 == 0) ? s.amplitude : -s.amplitude;
        const double tc = target > v ? s.tau_rise : s.tau_fall;
        v = target + (v - target) * std::exp(-h / tc);
    }
    CHECK(w.voltage(K * h) == doctest::Approx(v).epsilon(1e-12));

    const DriveWaveform off(s, 1e-3);
    CHECK(off.voltage(1e-3 + 5 * s.tau_fall) == doctest::Approx(off.voltage(1e-3) * std::exp(-5.0)));
    CHECK_THROWS_AS(drive_voltage(s, -1.0), DomainError);
}

TEST_CASE("Cole-Cole fit recovers noiseless parameters") {
    const DielectricModel m;
    std::vector<PermittivityPoint> pts;
    for (int i = 0; i <= 32; ++i) {
        const double f = 100.0 * std::pow(10.0, i / 8.0);
        pts.push_back({f, cole_cole_kappa(m, 2 * kPi * f).real()});
    }
    const ColeColeFit fit = fit_cole_cole(pts, m.kappa_inf);
    CHECK(fit.kappa_s == doctest::Approx(m.kappa_s).epsilon(1e-6));
    CHECK(fit.tau == doctest::Approx(m.tau).epsilon(1e-6));
    CHECK(fit.alpha == doctest::Approx(m.alpha).epsilon(1e-6));
    CHECK_FALSE(fit.clamped);

    std::vector<PermittivityPoint> narrow(pts.begin(), pts.begin() + 8);
    CHECK_THROWS_AS(fit_cole_cole(narrow, m.kappa_inf), InsufficientData);
}

TEST_CASE("model validation names the field") {
    DielectricModel m;
    m.alpha = 1.2;
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("dielectric.alpha"), ConfigError);
    DriveSignal s;
    s.frequency = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

}  // TEST_SUITE
