#include "eaclutch/numerics/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/constants.hpp"
#include "eaclutch/numerics/quadrature.hpp"

namespace eaclutch {

namespace {

constexpr int kSeriesTermCap = 10000;
constexpr double kSeriesRadius = 5.0;
// Series is abandoned when the largest term dwarfs the result by this much
// (cancellation would eat the requested accuracy).
constexpr double kCancellationLimit = 1e4;

constexpr Tolerance kMlQuad{1e-13, 1e-300, 2000};

struct SeriesResult {
    double value;
    double max_term;
    bool converged;
};

// Sum z^n / Gamma(alpha n + beta) with Neumaier-compensated addition.
SeriesResult ml_series(double alpha, double beta, double z) {
    double sum = 0.0, comp = 0.0, max_term = 0.0;
    const double logz = z == 0.0 ? 0.0 : std::log(std::abs(z));
    const bool negative = z < 0.0;
    for (int n = 0; n < kSeriesTermCap; ++n) {
        double term;
        if (n == 0) {
            term = 1.0 / std::tgamma(beta);
        } else if (z == 0.0) {
            break;
        } else {
            int sg = 0;
            const double lg = lgamma_r(alpha * n + beta, &sg);
            term = sg * std::exp(n * logz - lg);
            if (negative && (n % 2 == 1)) term = -term;
        }
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        max_term = std::max(max_term, std::abs(term));
        const double total = sum + comp;
        // only stop once past the peak of the term sequence
        if (n > 2 && alpha * n + beta > 2.0 && std::abs(term) <= 1e-17 * std::abs(total) &&
            std::abs(term) < max_term) {
            return {total, max_term, true};
        }
        if (n > 2 && total == 0.0 && term == 0.0) return {total, max_term, true};
    }
    return {sum + comp, max_term, false};
}

// Integral representation for z < 0 and 0 < alpha < 1 (the contour
// deformation of Gorenflo, Loutchko and Luchko).
double ml_integral(double alpha, double beta, double z) {
    const double pi = kPi;
    const double ca = std::cos(alpha * pi);
    const double s1 = std::sin(pi * (1.0 - beta));
    const double s2 = std::sin(pi * (1.0 - beta + alpha));
    const double p = (1.0 - beta) / alpha;
    const double inv_alpha = 1.0 / alpha;
    auto K = [&](double chi) {
        if (chi <= 0.0) return 0.0;
        const double num = chi * s1 - z * s2;
        const double den = chi * chi - 2.0 * chi * z * ca + z * z;
        return std::pow(chi, p) * std::exp(-std::pow(chi, inv_alpha)) * num / den / (alpha * pi);
    };

    // the integrand dies as exp(-chi^(1/alpha)); nothing matters beyond ~800^alpha
    const double chi_max = std::pow(800.0, alpha);
    const double peak = std::abs(z * ca);
    auto points_for = [&](double lo) {
        std::array<double, 5> pts{lo, 0.0, 0.0, 0.0, 0.0};
        int n = 1;
        if (lo < 1.0 && 1.0 < chi_max) pts[n++] = 1.0;
        if (peak > pts[n - 1] && peak < chi_max) pts[n++] = peak;
        pts[n++] = chi_max;
        pts[n++] = std::numeric_limits<double>::infinity();
        return std::pair{pts, n};
    };

    if (beta < 1.0 + alpha) {
        auto [pts, n] = points_for(0.0);
        return integrate_adaptive(K, std::span<const double>(pts.data(), n), kMlQuad).value;
    }

    // the arc must keep z on its outer side
    const double eps = std::min(1.0, 0.5 * std::abs(z));
    auto [pts, n] = points_for(eps);
    const double radial = integrate_adaptive(K, std::span<const double>(pts.data(), n), kMlQuad).value;
    const double e1a = std::pow(eps, inv_alpha);
    const double pref = std::pow(eps, 1.0 + p) / (2.0 * alpha * pi);
    auto P = [&](double phi) {
        const double w = e1a * std::sin(phi / alpha) + phi * (1.0 + p);
        const std::complex<double> num = pref * std::exp(e1a * std::cos(phi / alpha)) *
                                         std::complex<double>(std::cos(w), std::sin(w));
        const std::complex<double> den = eps * std::polar(1.0, phi) - z;
        return (num / den).real();
    };
    const double arc = integrate_adaptive(P, -alpha * pi, alpha * pi, kMlQuad).value;
    return radial + arc;
}

// alpha = 1 closed forms.
double ml_alpha_one(double beta, double z) {
    if (beta == 1.0) return std::exp(z);
    if (beta == 2.0) return z == 0.0 ? 1.0 : std::expm1(z) / z;
    if (beta > 1.0) {
        // E_{1,b}(z) = (1/Gamma(b)) int_0^1 exp(z (1 - w^{1/(b-1)})) dw
        const double q = 1.0 / (beta - 1.0);
        auto f = [&](double w) { return std::exp(z * (1.0 - std::pow(w, q))); };
        return integrate_adaptive(f, 0.0, 1.0, kMlQuad).value / std::tgamma(beta);
    }
    // upward recurrence E_{1,b} = 1/Gamma(b) + z E_{1,b+1}
    return 1.0 / std::tgamma(beta) + z * ml_alpha_one(beta + 1.0, z);
}

}  // namespace

double mittag_leffler(double alpha, double beta, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("mittag_leffler: alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw DomainError("mittag_leffler: beta must be > 0");
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: z must be finite");

    if (alpha == 1.0) return ml_alpha_one(beta, z);

    if (z > 0.0) {
        if (z > kSeriesRadius) throw DomainError("mittag_leffler: z > 5 is outside the supported range");
        SeriesResult s = ml_series(alpha, beta, z);
        if (!s.converged) throw NumericalFailure("mittag_leffler: series did not converge", s.value);
        return s.value;
    }

    if (-z <= kSeriesRadius) {
        SeriesResult s = ml_series(alpha, beta, z);
        if (s.converged && s.max_term <= kCancellationLimit * std::max(std::abs(s.value), 1e-300)) return s.value;
        if (!s.converged && -z <= 1.0) throw NumericalFailure("mittag_leffler: series did not converge", s.value);
        // heavy cancellation: fall through to the integral
    }
    return ml_integral(alpha, beta, z);
}

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
    if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
    return std::cyl_bessel_k(std::abs(nu), x);
}

}  // namespace eaclutch
