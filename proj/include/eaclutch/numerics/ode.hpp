#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eaclutch/numerics/constants.hpp"

namespace eaclutch {

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeEvent {
    std::function<double(double t, std::span<const double> y)> fn;
    int direction = 0;     // +1: only upward crossings, -1: only downward, 0: both
    bool terminal = true;
    std::string name;
};

struct OdeProblem {
    OdeRhs rhs;
    std::vector<double> initial_state;
    double t0 = 0.0;
    double t_end = 0.0;
    std::vector<OdeEvent> events;
    // Times where the rhs is known to be non-smooth; steps never straddle them.
    std::vector<double> breakpoints;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 picks one automatically
    // Typical magnitude per component, used for Jacobian perturbations. Empty
    // means max(|y|, 1e-6).
    std::vector<double> state_scale;
};

struct EventHit {
    int index = -1;
    double t = 0.0;
    std::vector<double> y;
};

struct OdeSolution {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> dydt;
    std::vector<EventHit> hits;  // every located crossing, in time order
    bool terminated_by_event = false;
    int steps = 0;
    int rejected = 0;
    int rhs_evals = 0;
    int jacobians = 0;

    // Hermite cubic dense output on [t.front(), t.back()].
    std::vector<double> at(double time) const;
    double at(double time, std::size_t component) const;
    const EventHit* terminal_event() const {
        return terminated_by_event && !hits.empty() ? &hits.back() : nullptr;
    }
};

/// Adaptive L-stable SDIRK of order 4 (embedded order 3), simplified Newton
/// with finite-difference Jacobian. Throws StiffnessError if the step size
/// collapses.
OdeSolution solve_ivp(const OdeProblem& problem, const Tolerance& tol = kPhysicsTolerance);

/// Butcher tableau used by solve_ivp, exposed so tests can check order
/// conditions.
struct SdirkTableau {
    static constexpr int stages = 5;
    double gamma;
    double c[5];
    double a[5][5];
    double b[5];
    double bhat[5];
};
const SdirkTableau& sdirk4_tableau();

}  // namespace eaclutch
