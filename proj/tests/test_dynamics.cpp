#include <doctest.h>

#include <array>
#include <cstring>
#include <cmath>
#include <vector>

#include "eaclutch/dynamics/bode.hpp"
#include "eaclutch/dynamics/simulate.hpp"
#include "eaclutch/dynamics/statics.hpp"
#include "eaclutch/dynamics/sweep.hpp"
#include "eaclutch/errors.hpp"

using namespace eaclutch;

namespace {

// Fixed-step implicit trapezoid on the gap equation, Newton with a
// finite-difference Jacobian. Returns the first crossing of `target`,
// linearly interpolated inside the step.
double trapezoid_crossing(const ClutchConfig& c, double y0, double target, double h, double t_max) {
    std::array<double, 2> y{y0, 0.0};
    std::array<double, 2> f = gap_dynamics_rhs(y, 0.0, c);
    for (double t = 0.0; t < t_max; t += h) {
        const double t1 = t + h;
        std::array<double, 2> z{y[0] + h * f[0], y[1] + h * f[1]};
        std::array<double, 2> fz{};
        for (int it = 0; it < 30; ++it) {
            fz = gap_dynamics_rhs(z, t1, c);
            const double r0 = z[0] - y[0] - 0.5 * h * (f[0] + fz[0]);
            const double r1 = z[1] - y[1] - 0.5 * h * (f[1] + fz[1]);
            // Jacobian of the residual
            double J[2][2];
            for (int j = 0; j < 2; ++j) {
                std::array<double, 2> zp = z;
                const double d = 1e-7 * std::max(std::abs(z[j]), j == 0 ? 1e-6 : 1e-4);
                zp[j] += d;
                const auto fp = gap_dynamics_rhs(zp, t1, c);
                J[0][j] = (j == 0 ? 1.0 : 0.0) - 0.5 * h * (fp[0] - fz[0]) / d;
                J[1][j] = (j == 1 ? 1.0 : 0.0) - 0.5 * h * (fp[1] - fz[1]) / d;
            }
            const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            const double d0 = (r0 * J[1][1] - r1 * J[0][1]) / det;
            const double d1 = (J[0][0] * r1 - J[1][0] * r0) / det;
            z[0] -= d0;
            z[1] -= d1;
            if (std::abs(d0) < 1e-15 && std::abs(d1) < 1e-12 * std::max(1.0, std::abs(z[1]))) break;
        }
        fz = gap_dynamics_rhs(z, t1, c);
        if ((y[0] - target) * (z[0] - target) <= 0.0) return t + h * (y[0] - target) / (y[0] - z[0]);
        y = z;
        f = fz;
    }
    return NAN;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("voltage-dependent multiplier") {
    LambdaModel lm;
    CHECK(lambda_ea(300.0, lm) == doctest::Approx(2.40 - 0.0058 * 300.0));
    CHECK(lambda_ea(-150.0, lm) == doctest::Approx(2.40 - 0.0058 * 150.0));
    CHECK(lambda_ea(1000.0, lm) == 0.0);  // never negative
    lm.law = LambdaLaw::unity;
    CHECK(lambda_ea(300.0, lm) == 1.0);
    lm.law = LambdaLaw::fixed;
    lm.fixed_value = 1.7;
    CHECK(lambda_ea(300.0, lm) == 1.7);
}

TEST_CASE("derived masses and the load-cell resonance") {
    const ClutchConfig c;
    CHECK(c.dielectric_mass() == doctest::Approx(1900.0 * 24e-6 * 55.5e-3 * 2e-3));
    CHECK(c.substrate_mass() == doctest::Approx(8500.0 * 55.5e-3 * 2e-3 * 2e-3));
    LoadCellModel lc;
    CHECK(lc.resonance_hz() == doctest::Approx(643.4).epsilon(0.01));
    lc.check_frequency = 643.4;
    CHECK_NOTHROW(lc.validate());
    lc.check_frequency = 700.0;
    CHECK_THROWS_AS(lc.validate(), ConfigError);
}

TEST_CASE("static equilibria balance the forces") {
    const ClutchConfig c;
    const double L = c.geometry.substrate_overlap_length, w = c.geometry.substrate_width;
    const double load = c.dielectric_mass() * c.gravity + c.f_preload;
    const double t0 = equilibrium_gap(c, 0.0);
    CHECK(contact_force(t0, c.contact, L, w) == doctest::Approx(load).epsilon(1e-10));
    CHECK(gap_forces(c, t0, 0.0, c.dielectric.kappa_s, 0.0).acceleration == doctest::Approx(0.0).scale(1e-6 * load / c.dielectric_mass()));

    for (double v : {100.0, 200.0, 300.0}) {
        const double te = equilibrium_gap(c, v, t0);
        const double ea = lambda_ea(v, c.lambda) * averaged_ea_force(te, c.geometry, c.dielectric.kappa_s, v, c.contact);
        CHECK(contact_force(te, c.contact, L, w) == doctest::Approx(ea + load).epsilon(1e-9));
        CHECK(te < t0);
    }
    // more voltage, tighter gap
    CHECK(equilibrium_gap(c, 300.0, t0) < equilibrium_gap(c, 200.0, t0));
}

TEST_CASE("preload estimate inverts the zero-voltage kinetic shear") {
    ClutchConfig c;
    for (double fp : {0.0, 0.05, 0.125, 0.4}) {
        c.f_preload = fp;
        const double t0 = equilibrium_gap(c, 0.0);
        const GapForces f = gap_forces(c, t0, 0.0, c.dielectric.kappa_s, 0.0);
        const double shear = shear_force(c, f.normal_base, f.contact, true);
        const double offset = c.mu_base_kinetic * c.dielectric_mass() * c.gravity / (c.mu_base_kinetic + c.mu_d_kinetic);
        const PreloadEstimate est = preload_from_baseline(shear, c);
        CHECK(est.value == doctest::Approx(fp + offset).epsilon(1e-9));
        CHECK_FALSE(est.clamped);
    }
    CHECK(preload_from_baseline(0.0, c).clamped);
}

TEST_CASE("engagement time agrees with an independent fixed-step integration") {
    const ClutchConfig c;
    SimOptions opt;
    opt.record_trace = false;
    const SimResult r = simulate_engagement(c, opt);
    REQUIRE(r.reason == Termination::threshold_reached);
    const double target = r.initial_gap - c.engage_threshold * (r.initial_gap - r.settled_gap);
    const double ref = trapezoid_crossing(c, r.initial_gap, target, 2e-9, 3e-5);
    INFO("sim=" << r.time << " ref=" << ref);
    CHECK(r.time == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("engagement needs a drive; with none the gap stays put") {
    ClutchConfig c;
    c.drive.waveform = Waveform::dc;
    c.drive.amplitude = 0.0;
    CHECK_THROWS_AS(simulate_engagement(c), DomainError);
    const double t0 = equilibrium_gap(c, 0.0);
    CHECK(std::isnan(trapezoid_crossing(c, t0, t0 * (1 - 1e-6), 1e-8, 2e-5)));
}

TEST_CASE("a larger engagement threshold takes longer to reach") {
    ClutchConfig c;
    SimOptions opt;
    opt.record_trace = false;
    double prev = 0.0;
    for (double th : {0.001, 0.005, 0.05, 0.5}) {
        c.engage_threshold = th;
        const SimResult r = simulate_engagement(c, opt);
        REQUIRE(r.reason == Termination::threshold_reached);
        CHECK(r.time > prev);
        prev = r.time;
    }
}

TEST_CASE("release run on the nominal clutch") {
    ClutchConfig c;
    c.hold_time = 0.05;
    const LoadCellModel lc;
    const SimResult r = simulate_release(c, lc);
    CHECK((r.reason == Termination::motion_ceased || r.reason == Termination::returned_to_zero));
    CHECK(r.time > 0.0);
    CHECK(r.time_alt > 0.0);
    CHECK(r.time_alt < r.time);  // 10 % of the fall comes before 90 %
    REQUIRE_FALSE(r.trace.loadcell_x.empty());
    // load cell starts at force_ratio of the capacity
    CHECK(lc.k_lc * std::abs(r.trace.loadcell_x.front()) == doctest::Approx(0.8 * r.capacity).epsilon(1e-6));

    // tolerance refinement moves the answer by well under a percent
    SimOptions fine;
    fine.tol.rel = kPhysicsTolerance.rel / 10;
    fine.tol.abs = kPhysicsTolerance.abs / 10;
    fine.record_trace = false;
    CHECK(simulate_release(c, lc, 0.8, fine).time == doctest::Approx(r.time).epsilon(0.005));
}

TEST_CASE("sweep: serial and parallel runs give identical rows") {
    const ClutchConfig c;
    std::vector<SweepAxis> axes{{"voltage", {150.0, 225.0, 300.0}}, {"substrate_width", {1e-3, 2e-3}}};
    SweepOptions s;
    s.parallel = false;
    s.sim.record_trace = false;
    SweepOptions p = s;
    p.parallel = true;
    p.threads = 4;
    const SweepTable a = parameter_sweep(c, axes, SweepMetric::engage, s);
    const SweepTable b = parameter_sweep(c, axes, SweepMetric::engage, p);
    REQUIRE(a.rows.size() == 6);
    REQUIRE(b.rows.size() == 6);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].inputs == b.rows[i].inputs);
        CHECK(std::memcmp(&a.rows[i].metric, &b.rows[i].metric, sizeof(double)) == 0);
        CHECK(std::memcmp(&a.rows[i].settled_gap, &b.rows[i].settled_gap, sizeof(double)) == 0);
        CHECK(a.rows[i].error == b.rows[i].error);
    }
    // last axis fastest
    CHECK(a.rows[1].inputs == std::vector<double>{150.0, 2e-3});
    // one cell equals the standalone evaluation
    ClutchConfig one = c;
    apply_axis(one, "voltage", 225.0);
    apply_axis(one, "substrate_width", 1e-3);
    CHECK(evaluate_cell(one, SweepMetric::engage, s).metric == a.rows[2].metric);
}

TEST_CASE("sweep axes and bad cells") {
    ClutchConfig c;
    apply_axis(c, "dielectric_thickness", 10e-6);
    CHECK(c.dielectric.thickness == 10e-6);
    apply_axis(c, "rise_time", 8.3e-6);
    CHECK(c.drive.tau_rise == doctest::Approx(8.3e-6 / std::log(9.0)));
    CHECK_THROWS_AS(apply_axis(c, "no_such_axis", 1.0), ConfigError);

    std::vector<SweepAxis> axes{{"voltage", {-5.0, 300.0}}};
    SweepOptions s;
    s.parallel = false;
    s.sim.record_trace = false;
    const SweepTable t = parameter_sweep(ClutchConfig{}, axes, SweepMetric::engage, s);
    CHECK_FALSE(t.rows[0].error.empty());
    CHECK(t.rows[1].error.empty());
}

TEST_CASE("capacity vs frequency: low-frequency limit and the -3 dB helper") {
    const ClutchConfig c;
    BodeOptions o;
    o.quasi_static = true;
    const std::vector<double> f{0.5, 1e5};
    const BodeResult r = capacity_vs_frequency(c, f, o);
    CHECK(r.points[0].capacity == doctest::Approx(r.dc_capacity).epsilon(0.05));
    CHECK(r.points[1].capacity < r.points[0].capacity);

    std::vector<CapacityPoint> pts{{100.0, 1.0}, {1000.0, 0.8}, {10000.0, 0.6}};
    // -3 dB between 1 kHz and 10 kHz, dB interpolated on log f
    const double x = (10 * std::log10(0.5) - 20 * std::log10(0.8)) / (20 * std::log10(0.6) - 20 * std::log10(0.8));
    CHECK(minus_3db_frequency(1.0, pts) == doctest::Approx(std::pow(10.0, 3.0 + x)));
    pts.pop_back();
    CHECK(std::isnan(minus_3db_frequency(1.0, pts)));
}

TEST_CASE("multiplier law recovered from its own capacity curves") {
    const ClutchConfig c;
    BodeOptions o;
    o.quasi_static = true;
    std::vector<CapacityObservation> data;
    const std::vector<double> f{100.0, 3e3};
    for (double v : {150.0, 300.0}) {
        ClutchConfig cv = c;
        cv.drive.amplitude = v;
        for (const auto& p : capacity_vs_frequency(cv, f, o).points) data.push_back({v, p.frequency, p.capacity});
    }
    const LambdaFit fit = fit_lambda_law(c, data, o);
    CHECK(fit.intercept == doctest::Approx(2.40).epsilon(1e-4));
    CHECK(fit.slope == doctest::Approx(-0.0058).epsilon(1e-4));
}

}  // TEST_SUITE
