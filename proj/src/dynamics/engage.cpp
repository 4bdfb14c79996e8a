#include <cmath>
#include <map>
#include <mutex>

#include "eaclutch/dynamics/simulate.hpp"
#include "eaclutch/dynamics/statics.hpp"
#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/ode.hpp"

namespace eaclutch {

std::shared_ptr<const RelaxationKernel> relaxation_kernel_for(double alpha) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const RelaxationKernel>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(alpha);
        if (it != cache.end()) return it->second;
    }
    // build outside the lock; a racing duplicate is harmless
    auto k = std::make_shared<const RelaxationKernel>(alpha);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(alpha, k).first->second;
}

SimResult simulate_engagement(const ClutchConfig& c, const SimOptions& opt) {
    c.validate();
    if (!(c.drive.amplitude > 0.0)) throw DomainError("simulate_engagement: drive amplitude must be > 0");
    const double t_max = std::isnan(opt.t_max) ? 2e-3 : opt.t_max;

    SimResult out;
    out.initial_gap = equilibrium_gap(c, 0.0);
    out.settled_gap = equilibrium_gap(c, c.drive.amplitude, out.initial_gap);
    out.capacity = shear_capacity(c, out.settled_gap);
    const double target = out.initial_gap - c.engage_threshold * (out.initial_gap - out.settled_gap);

    auto kernel = opt.kernel ? opt.kernel : relaxation_kernel_for(c.dielectric.alpha);
    const DrivenDielectric diel(c.dielectric, DriveWaveform(c.drive), kernel);

    OdeProblem p;
    p.rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        const GapForces f = gap_forces(c, y[0], y[1], diel.kappa(t), diel.voltage(t));
        dy[0] = y[1];
        dy[1] = f.acceleration;
    };
    p.initial_state = {out.initial_gap, 0.0};
    p.t0 = 0.0;
    p.t_end = t_max;
    p.breakpoints = diel.waveform().edges(0.0, t_max);
    p.initial_step = 1e-9;
    p.state_scale = {c.contact.sigma_d, 1e-3};
    const double dir = out.settled_gap < out.initial_gap ? -1.0 : 1.0;
    p.events.push_back({[target](double, std::span<const double> y) { return y[0] - target; },
                        dir < 0.0 ? -1 : 1, true, "engaged"});

    const OdeSolution sol = solve_ivp(p, opt.tol);
    if (const EventHit* hit = sol.terminal_event()) {
        out.time = hit->t;
        out.reason = Termination::threshold_reached;
    } else {
        out.reason = Termination::time_limit;
        out.warnings.push_back("gap did not reach the engagement threshold before t_max");
    }

    if (opt.record_trace) {
        SimTrace& tr = out.trace;
        for (std::size_t i = 0; i < sol.t.size(); ++i) {
            // duplicated breakpoint samples would break strict monotonicity
            if (!tr.t.empty() && sol.t[i] <= tr.t.back()) continue;
            const double t = sol.t[i], kap = diel.kappa(t), v = diel.voltage(t);
            const GapForces f = gap_forces(c, sol.y[i][0], sol.y[i][1], kap, v);
            tr.t.push_back(t);
            tr.gap.push_back(sol.y[i][0]);
            tr.gap_velocity.push_back(sol.y[i][1]);
            tr.shear.push_back(shear_force(c, f.normal_base, f.contact, true));
            tr.voltage.push_back(v);
            tr.kappa.push_back(kap);
        }
    }
    return out;
}

}  // namespace eaclutch
