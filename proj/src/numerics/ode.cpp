#include "eaclutch/numerics/ode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "eaclutch/errors.hpp"

namespace eaclutch {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Hairer & Wanner's L-stable SDIRK, gamma = 1/4.
const SdirkTableau kTableau = {
    0.25,
    {0.25, 0.75, 11.0 / 20.0, 0.5, 1.0},
    {{0.25, 0, 0, 0, 0},
     {0.5, 0.25, 0, 0, 0},
     {17.0 / 50.0, -1.0 / 25.0, 0.25, 0, 0},
     {371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0},
     {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25}},
    {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25},
    {59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0},
};

class Integrator {
public:
    Integrator(const OdeProblem& p, const Tolerance& tol) : p_(p), tol_(tol), n_(p.initial_state.size()) {}

    OdeSolution run();

private:
    void f(double t, const Vec& y, Vec& out) {
        p_.rhs(t, std::span<const double>(y.data(), n_), std::span<double>(out.data(), n_));
        ++sol_.rhs_evals;
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (!std::isfinite(out[i])) {
                std::ostringstream os;
                os << "ode: non-finite derivative at t = " << t;
                throw StiffnessError(os.str(), t);
            }
        }
    }

    double norm(const Vec& e, const Vec& y0, const Vec& y1) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc = tol_.abs + tol_.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double r = e[i] / sc;
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(n_));
    }

    void jacobian(double t, const Vec& y, const Vec& fy) {
        J_.resize(n_, n_);
        Vec yp = y, fp(n_);
        const double sq = std::sqrt(std::numeric_limits<double>::epsilon());
        for (std::size_t j = 0; j < n_; ++j) {
            const double typ = p_.state_scale.empty() ? 1e-6 : p_.state_scale[j];
            const double d = sq * std::max(std::abs(y[j]), typ);
            yp[j] = y[j] + d;
            f(t, yp, fp);
            J_.col(j) = (fp - fy) / (yp[j] - y[j]);
            yp[j] = y[j];
        }
        ++sol_.jacobians;
        jac_fresh_ = true;
    }

    // One attempted step; returns false if Newton failed.
    bool attempt(double t, double h, const Vec& y, const Vec& fy, Vec& ynew, Vec& fnew, double& err);

    double initial_step(double t, const Vec& y, const Vec& fy, double span) const;
    void record(double t, const Vec& y, const Vec& fy) {
        sol_.t.push_back(t);
        sol_.y.emplace_back(y.data(), y.data() + n_);
        sol_.dydt.emplace_back(fy.data(), fy.data() + n_);
    }
    double event_value(int k, double t, const Vec& y) const {
        return p_.events[k].fn(t, std::span<const double>(y.data(), n_));
    }
    Vec hermite(double t0, double t1, const Vec& y0, const Vec& y1, const Vec& f0, const Vec& f1,
                double t) const;

    const OdeProblem& p_;
    Tolerance tol_;
    std::size_t n_;
    OdeSolution sol_;
    Mat J_;
    bool jac_fresh_ = false;
    double last_theta_ = 0.0;
};

double Integrator::initial_step(double t, const Vec& y, const Vec& fy, double span) const {
    if (p_.initial_step > 0.0) return std::min(p_.initial_step, span);
    const Vec zero = Vec::Zero(n_);
    const double d0 = norm(y, y, zero);
    const double d1 = norm(fy, y, zero);
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
    (void)t;
    h = std::min({h, span, p_.max_step});
    return std::max(h, 1e-12 * span);
}

bool Integrator::attempt(double t, double h, const Vec& y, const Vec& fy, Vec& ynew, Vec& fnew,
                         double& err) {
    const auto& T = kTableau;
    Mat M = Mat::Identity(n_, n_) - h * T.gamma * J_;
    Eigen::PartialPivLU<Mat> lu(M);
    std::array<Vec, 5> K;
    Vec Y(n_), rhs_known(n_), fY(n_), dY(n_), zero = Vec::Zero(n_);
    double theta_max = 0.0;
    for (int i = 0; i < 5; ++i) {
        rhs_known = y;
        for (int j = 0; j < i; ++j) rhs_known += h * T.a[i][j] * K[j];
        Y = rhs_known + h * T.gamma * (i == 0 ? fy : K[i - 1]);
        const double ti = t + T.c[i] * h;
        double prev = 0.0;
        bool ok = false;
        for (int it = 0; it < 10; ++it) {
            f(ti, Y, fY);
            dY = lu.solve(rhs_known - Y + h * T.gamma * fY);
            Y += dY;
            const double dn = norm(dY, y, Y);
            if (it > 0) {
                const double theta = dn / std::max(prev, 1e-300);
                theta_max = std::max(theta_max, theta);
                if (theta > 0.95) break;  // diverging
                if (theta / (1.0 - theta) * dn <= 0.03) {
                    ok = true;
                    break;
                }
            }
            if (dn <= 1e-3) {
                ok = true;
                break;
            }
            prev = dn;
        }
        if (!ok) {
            last_theta_ = 1.0;
            return false;
        }
        K[i] = (Y - rhs_known) / (h * T.gamma);
    }
    last_theta_ = theta_max;
    ynew = Y;
    fnew = K[4];
    Vec e = Vec::Zero(n_);
    for (int i = 0; i < 5; ++i) e += h * (T.b[i] - T.bhat[i]) * K[i];
    // filter the estimate through the iteration matrix, as is usual for
    // stiff embedded pairs
    e = lu.solve(e);
    err = norm(e, y, ynew);
    return std::isfinite(err);
}

Vec Integrator::hermite(double t0, double t1, const Vec& y0, const Vec& y1, const Vec& f0, const Vec& f1,
                        double t) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

OdeSolution Integrator::run() {
    if (!p_.rhs) throw DomainError("solve_ivp: rhs not set");
    if (n_ == 0) throw DomainError("solve_ivp: empty state");
    if (!(p_.t_end > p_.t0)) throw DomainError("solve_ivp: t_end must exceed t0");
    if (!p_.state_scale.empty() && p_.state_scale.size() != n_)
        throw DomainError("solve_ivp: state_scale has wrong size");
    tol_.validate();

    // breakpoints within rounding of an end (or of each other) would leave a
    // segment shorter than the minimum step
    const double merge = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max({std::abs(p_.t0), std::abs(p_.t_end), p_.t_end - p_.t0});
    std::vector<double> bps;
    for (double b : p_.breakpoints)
        if (b > p_.t0 + merge && b < p_.t_end - merge) bps.push_back(b);
    bps.push_back(p_.t_end);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(), [&](double a, double b) { return b - a <= merge; }), bps.end());

    Vec y = Eigen::Map<const Vec>(p_.initial_state.data(), n_);
    Vec fy(n_), ynew(n_), fnew(n_);
    double t = p_.t0;
    f(t, y, fy);
    record(t, y, fy);

    const std::size_t ne = p_.events.size();
    std::vector<double> g(ne);
    for (std::size_t k = 0; k < ne; ++k) g[k] = event_value(static_cast<int>(k), t, y);

    const double span = p_.t_end - p_.t0;
    double h = initial_step(t, y, fy, span);
    jacobian(t, y, fy);
    int jac_age = 0;
    std::size_t next_bp = 0;

    while (t < p_.t_end) {
        while (next_bp < bps.size() && bps[next_bp] <= t) ++next_bp;
        const double limit = bps[next_bp];
        bool hits_limit = false;
        h = std::min(h, p_.max_step);
        if (t + h >= limit || t + 1.01 * h >= limit) {
            h = limit - t;
            hits_limit = true;
        }
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span);
        if (h < hmin) {
            std::ostringstream os;
            os << "ode: step size underflow at t = " << t;
            throw StiffnessError(os.str(), t);
        }

        double err = 0.0;
        const bool ok = attempt(t, h, y, fy, ynew, fnew, err);
        if (!ok) {
            ++sol_.rejected;
            if (!jac_fresh_) {
                jacobian(t, y, fy);
                jac_age = 0;
            } else {
                h *= 0.25;
            }
            continue;
        }
        if (err > 1.0) {
            ++sol_.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
            continue;
        }

        // accepted
        const double tnew = hits_limit ? limit : t + h;
        // events on the interpolant
        int terminal_k = -1;
        double t_event = tnew;
        for (std::size_t k = 0; k < ne; ++k) {
            const double g1 = event_value(static_cast<int>(k), tnew, ynew);
            const double g0 = g[k];
            const auto& ev = p_.events[k];
            const bool up = g0 < 0.0 && g1 >= 0.0;
            const bool down = g0 > 0.0 && g1 <= 0.0;
            if ((up && ev.direction >= 0) || (down && ev.direction <= 0)) {
                // Illinois false position on the Hermite interpolant
                double a = t, b = tnew, ga = g0, gb = g1;
                int side = 0;
                for (int it = 0; it < 200 && (b - a) > 1e-12 * h; ++it) {
                    double c = (a * gb - b * ga) / (gb - ga);
                    if (!(c > a && c < b)) c = 0.5 * (a + b);
                    const double gc = event_value(static_cast<int>(k), c, hermite(t, tnew, y, ynew, fy, fnew, c));
                    if ((gc < 0.0) == (ga < 0.0) && gc != 0.0) {
                        a = c;
                        ga = gc;
                        if (side == -1) gb *= 0.5;
                        side = -1;
                    } else {
                        b = c;
                        gb = gc;
                        if (side == 1) ga *= 0.5;
                        side = 1;
                        if (gc == 0.0) break;
                    }
                }
                const double tc = b;
                Vec yc = hermite(t, tnew, y, ynew, fy, fnew, tc);
                EventHit hit{static_cast<int>(k), tc, std::vector<double>(yc.data(), yc.data() + n_)};
                if (ev.terminal) {
                    if (tc < t_event || terminal_k < 0) {
                        t_event = tc;
                        terminal_k = static_cast<int>(k);
                    }
                } else {
                    sol_.hits.push_back(std::move(hit));
                }
            }
            g[k] = g1;
        }

        ++sol_.steps;
        if (terminal_k >= 0) {
            Vec yc = hermite(t, tnew, y, ynew, fy, fnew, t_event);
            Vec fc(n_);
            f(t_event, yc, fc);
            // drop non-terminal hits that fall after the terminal one
            std::erase_if(sol_.hits, [&](const EventHit& e) { return e.t > t_event; });
            if (t_event > t) record(t_event, yc, fc);
            sol_.hits.push_back({terminal_k, t_event, std::vector<double>(yc.data(), yc.data() + n_)});
            sol_.terminated_by_event = true;
            return std::move(sol_);
        }
        std::sort(sol_.hits.begin(), sol_.hits.end(), [](const EventHit& a, const EventHit& b) { return a.t < b.t; });

        t = tnew;
        y = ynew;
        fy = fnew;
        record(t, y, fy);
        if (hits_limit && t < p_.t_end) {
            // the rhs may jump at a breakpoint: store the point again with the
            // one-sided derivative of the next interval
            f(t, y, fy);
            record(t, y, fy);
        }

        const double fac = std::min(4.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.25)));
        h *= fac;
        ++jac_age;
        jac_fresh_ = false;
        if (last_theta_ > 0.3 || jac_age >= 8 || hits_limit) {
            jacobian(t, y, fy);
            jac_age = 0;
        }
    }
    return std::move(sol_);
}

}  // namespace

const SdirkTableau& sdirk4_tableau() { return kTableau; }

OdeSolution solve_ivp(const OdeProblem& problem, const Tolerance& tol) {
    Integrator it(problem, tol);
    return it.run();
}

std::vector<double> OdeSolution::at(double time) const {
    if (t.empty()) throw DomainError("OdeSolution::at: empty solution");
    if (time <= t.front()) return y.front();
    if (time >= t.back()) return y.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[i + 1] - t[i];
    if (h <= 0.0) return y[i + 1];
    const double s = (time - t[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    std::vector<double> out(y[i].size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = h00 * y[i][k] + h10 * h * dydt[i][k] + h01 * y[i + 1][k] + h11 * h * dydt[i + 1][k];
    return out;
}

double OdeSolution::at(double time, std::size_t component) const { return at(time).at(component); }

}  // namespace eaclutch
