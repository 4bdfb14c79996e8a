#include "eaclutch/numerics/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "eaclutch/errors.hpp"

namespace eaclutch {

void Tolerance::validate() const {
    if (!(rel > 0.0)) throw DomainError("tolerance: rel must be > 0");
    if (!(abs >= 0.0)) throw DomainError("tolerance: abs must be >= 0");
    if (max_iter < 1) throw DomainError("tolerance: max_iter must be >= 1");
}

namespace {

// Kronrod 15-point abscissae and weights; Gauss 7-point weights sit on the
// odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// A piece of the integration range after mapping to a finite interval.
struct Segment {
    enum class Map { none, upper_inf, lower_inf } map = Map::none;
    double anchor = 0.0;  // finite end for mapped segments
};

struct Piece {
    double lo, hi;
    double value, error;
    int segment;
    bool operator<(const Piece& o) const { return error < o.error; }
};

double eval(const Integrand& f, const Segment& s, double t) {
    switch (s.map) {
        case Segment::Map::none:
            return f(t);
        case Segment::Map::upper_inf: {
            const double u = 1.0 - t;
            return f(s.anchor + t / u) / (u * u);
        }
        case Segment::Map::lower_inf: {
            const double u = 1.0 - t;
            return f(s.anchor - t / u) / (u * u);
        }
    }
    return 0.0;
}

Piece gk15(const Integrand& f, const Segment& s, int idx, double lo, double hi, int& nevals) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = eval(f, s, c);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        f1[j] = eval(f, s, c - dx);
        f2[j] = eval(f, s, c + dx);
        resk += kWgk[j] * (f1[j] + f2[j]);
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
    }
    nevals += 15;
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    resk *= h;
    resg *= h;
    resasc *= std::abs(h);
    resabs *= std::abs(h);
    double err = std::abs(resk - resg);
    // QUADPACK's error scaling
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
    if (!std::isfinite(resk)) {
        std::ostringstream os;
        os << "quadrature: non-finite integrand on [" << lo << ", " << hi << "]";
        throw NumericalFailure(os.str(), resk);
    }
    return {lo, hi, resk, err, idx};
}

}  // namespace

QuadratureResult integrate_adaptive(const Integrand& f, std::span<const double> points,
                                    const Tolerance& tol) {
    tol.validate();
    if (points.size() < 2) throw DomainError("quadrature: need at least two points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] >= points[i - 1])) throw DomainError("quadrature: points must be ascending");
    }
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<Segment> segs;
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t i = 1; i < points.size(); ++i) {
        double a = points[i - 1], b = points[i];
        if (a == b) continue;
        if (a == -inf && b == inf) {
            segs.push_back({Segment::Map::lower_inf, 0.0});
            ranges.emplace_back(0.0, 1.0);
            segs.push_back({Segment::Map::upper_inf, 0.0});
            ranges.emplace_back(0.0, 1.0);
        } else if (b == inf) {
            segs.push_back({Segment::Map::upper_inf, a});
            ranges.emplace_back(0.0, 1.0);
        } else if (a == -inf) {
            segs.push_back({Segment::Map::lower_inf, b});
            ranges.emplace_back(0.0, 1.0);
        } else {
            segs.push_back({Segment::Map::none, 0.0});
            ranges.emplace_back(a, b);
        }
    }

    QuadratureResult out;
    std::priority_queue<Piece> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        Piece p = gk15(f, segs[i], static_cast<int>(i), ranges[i].first, ranges[i].second, out.evaluations);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    int splits = 0;
    auto done = [&] { return total_err <= std::max(tol.abs, tol.rel * std::abs(total)); };
    while (!heap.empty() && !done()) {
        if (splits >= tol.max_iter) {
            std::ostringstream os;
            os << "quadrature: no convergence after " << splits << " subdivisions (estimate " << total
               << ", error " << total_err << ")";
            throw NumericalFailure(os.str(), total);
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // interval cannot be split any further; accept what we have
            heap.push(worst);
            break;
        }
        Piece l = gk15(f, segs[worst.segment], worst.segment, worst.lo, mid, out.evaluations);
        Piece r = gk15(f, segs[worst.segment], worst.segment, mid, worst.hi, out.evaluations);
        total += l.value + r.value - worst.value;
        total_err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++splits;
    }

    // re-sum to shed the drift of incremental updates
    total = 0.0;
    total_err = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = total_err;
    if (!(total_err <= std::max(tol.abs, tol.rel * std::abs(total)) * 10.0)) {
        std::ostringstream os;
        os << "quadrature: error target missed (estimate " << total << ", error " << total_err << ")";
        throw NumericalFailure(os.str(), total);
    }
    return out;
}

QuadratureResult integrate_adaptive(const Integrand& f, double a, double b, const Tolerance& tol) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("quadrature: NaN limit");
    if (a == b) return {};
    if (a > b) {
        const std::array<double, 2> pts{b, a};
        QuadratureResult r = integrate_adaptive(f, pts, tol);
        r.value = -r.value;
        return r;
    }
    const std::array<double, 2> pts{a, b};
    return integrate_adaptive(f, pts, tol);
}

}  // namespace eaclutch
