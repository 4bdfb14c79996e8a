#include "eaclutch/polarization.hpp"

#include <algorithm>
#include <cmath>

#include "eaclutch/errors.hpp"
#include "eaclutch/numerics/constants.hpp"
#include "eaclutch/numerics/least_squares.hpp"
#include "eaclutch/numerics/special.hpp"

namespace eaclutch {

namespace {

constexpr double kTableXMin = 1e-6;
constexpr double kTableXMax = 1e8;
constexpr int kTableNodes = 1613;
// Alternating edge pairs whose combined residual drops below this are summed
// with the Euler tail estimate instead of term by term.
constexpr double kPairThreshold = 1e-3;

double rgamma(double z) {
    if (z > 0.0) return 1.0 / std::tgamma(z);
    return std::sin(kPi * z) * std::tgamma(1.0 - z) / kPi;
}

}  // namespace

void DielectricModel::validate() const {
    if (!(kappa_inf >= 1.0)) throw ConfigError("dielectric.kappa_inf", "must be >= 1");
    if (!(kappa_s >= kappa_inf)) throw ConfigError("dielectric.kappa_s", "must be >= kappa_inf");
    if (!(tau > 0.0)) throw ConfigError("dielectric.tau", "must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("dielectric.alpha", "must lie in (0, 1]");
    if (!(density > 0.0)) throw ConfigError("dielectric.density", "must be > 0");
    if (!(thickness > 0.0)) throw ConfigError("dielectric.thickness", "must be > 0");
    if (!(conductivity >= 0.0)) throw ConfigError("dielectric.conductivity", "must be >= 0");
}

void DriveSignal::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("drive.amplitude", "must be >= 0");
    if (!(frequency >= 0.0) || !std::isfinite(frequency)) throw ConfigError("drive.frequency", "must be >= 0");
    if (waveform == Waveform::bipolar_square && !(frequency > 0.0))
        throw ConfigError("drive.frequency", "bipolar drive needs a frequency > 0");
    if (!(tau_rise > 0.0)) throw ConfigError("drive.tau_rise", "must be > 0");
    if (!(tau_fall > 0.0)) throw ConfigError("drive.tau_fall", "must be > 0");
}

double DriveSignal::tau_from_transition(double t1090) {
    if (!(t1090 > 0.0)) throw DomainError("transition time must be > 0");
    return t1090 / std::log(9.0);
}

std::complex<double> cole_cole_kappa(const DielectricModel& m, double omega) {
    if (!(omega >= 0.0)) throw DomainError("cole_cole_kappa: omega must be >= 0");
    if (omega == 0.0) return {m.kappa_s, 0.0};
    // principal branch: (j w tau)^a = (w tau)^a e^{j a pi/2}
    const std::complex<double> jwt = std::polar(std::pow(omega * m.tau, m.alpha), m.alpha * kPi / 2.0);
    return m.kappa_inf + (m.kappa_s - m.kappa_inf) / (1.0 + jwt);
}

double relaxation_fraction(double alpha, double x) {
    if (!(x >= 0.0)) throw DomainError("relaxation_fraction: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double y = std::pow(x, alpha);
    return std::min(1.0, y * mittag_leffler(alpha, alpha + 1.0, -y));
}

double cole_cole_step_response(const DielectricModel& m, double t) {
    if (!(t >= 0.0)) throw DomainError("cole_cole_step_response: t must be >= 0");
    return m.kappa_inf + (m.kappa_s - m.kappa_inf) * relaxation_fraction(m.alpha, t / m.tau);
}

ColeColeFit fit_cole_cole(std::span<const PermittivityPoint> data, double kappa_inf) {
    if (data.size() < 3) throw InsufficientData("fit_cole_cole: need at least 3 points");
    double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
    for (const auto& p : data) {
        if (!(p.frequency_hz > 0.0) || !std::isfinite(p.kappa_real))
            throw DomainError("fit_cole_cole: frequencies must be > 0 and values finite");
        fmin = std::min(fmin, p.frequency_hz);
        fmax = std::max(fmax, p.frequency_hz);
    }
    if (fmax / fmin < 100.0) throw InsufficientData("fit_cole_cole: data must span at least two decades");

    // start: plateau from the lowest frequency, tau from the half-way crossing
    std::vector<PermittivityPoint> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.frequency_hz < b.frequency_hz; });
    const double ks0 = std::max(sorted.front().kappa_real, kappa_inf * 1.01);
    const double half = 0.5 * (ks0 + kappa_inf);
    double fc = std::sqrt(fmin * fmax);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1].kappa_real >= half && sorted[i].kappa_real < half) {
            fc = std::sqrt(sorted[i - 1].frequency_hz * sorted[i].frequency_hz);
            break;
        }
    }
    // parameters: kappa_s, ln tau, alpha
    std::vector<double> init{ks0, std::log(1.0 / (2.0 * kPi * fc)), 0.7};
    std::vector<ParamBounds> bounds{{kappa_inf, 1e7}, {-60.0, 10.0}, {0.02, 1.0}};
    auto res = [&](std::span<const double> q, std::span<double> out) {
        DielectricModel m;
        m.kappa_inf = kappa_inf;
        m.kappa_s = q[0];
        m.tau = std::exp(q[1]);
        m.alpha = q[2];
        for (std::size_t i = 0; i < data.size(); ++i)
            out[i] = cole_cole_kappa(m, 2.0 * kPi * data[i].frequency_hz).real() - data[i].kappa_real;
    };
    Tolerance tol{1e-12, 0.0, 500};
    FitResult fr = fit_residuals(res, data.size(), init, bounds, tol);
    ColeColeFit out;
    out.kappa_s = fr.params[0];
    out.tau = std::exp(fr.params[1]);
    out.alpha = fr.params[2];
    out.se_kappa_s = fr.std_errors[0];
    out.se_tau = out.tau * fr.std_errors[1];
    out.se_alpha = fr.std_errors[2];
    out.residual_norm = fr.residual_norm;
    out.clamped = fr.clamped;
    return out;
}

RelaxationKernel::RelaxationKernel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("RelaxationKernel: alpha must lie in (0, 1]");
    u0_ = std::log(kTableXMin);
    du_ = (std::log(kTableXMax) - u0_) / (kTableNodes - 1);
    val_.resize(kTableNodes);
    der_.resize(kTableNodes);
    for (int i = 0; i < kTableNodes; ++i) {
        const double y = std::exp(alpha * (u0_ + i * du_));
        val_[i] = mittag_leffler(alpha, 1.0, -y);
        der_[i] = -y * mittag_leffler(alpha, alpha, -y);
    }
    for (int k = 0; k < 3; ++k) {
        small_c_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * rgamma(1.0 + (k + 1) * alpha);
        large_c_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * rgamma(1.0 - (k + 1) * alpha);
    }
}

double RelaxationKernel::residual(double x) const {
    if (x <= 0.0) return 1.0;
    if (x < kTableXMin) {
        const double y = std::pow(x, alpha_);
        return 1.0 - y * (small_c_[0] + y * (small_c_[1] + y * small_c_[2]));
    }
    if (x > kTableXMax) {
        const double iy = std::pow(x, -alpha_);
        return iy * (large_c_[0] + iy * (large_c_[1] + iy * large_c_[2]));
    }
    const double u = (std::log(x) - u0_) / du_;
    int i = static_cast<int>(u);
    i = std::clamp(i, 0, kTableNodes - 2);
    const double s = u - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * val_[i] + h10 * du_ * der_[i] + h01 * val_[i + 1] + h11 * du_ * der_[i + 1];
}

DriveWaveform::DriveWaveform(const DriveSignal& s, double t_off) : signal_(s), t_off_(t_off) {
    s.validate();
    if (!(t_off > 0.0)) throw DomainError("DriveWaveform: t_off must be > 0");
    bipolar_ = s.waveform == Waveform::bipolar_square;
    half_ = bipolar_ ? 0.5 / s.frequency : std::numeric_limits<double>::infinity();
}

double DriveWaveform::level(double t) const {
    if (t < 0.0 || t >= t_off_) return 0.0;
    if (!bipolar_) return 1.0;
    const auto k = static_cast<long long>(std::floor(t / half_));
    return (k % 2 == 0) ? 1.0 : -1.0;
}

std::vector<double> DriveWaveform::edges(double t0, double t1) const {
    std::vector<double> out;
    if (t0 < 0.0 && t1 >= 0.0) out.push_back(0.0);
    if (bipolar_) {
        const double stop = std::min(t1, t_off_);
        auto k = static_cast<long long>(std::floor(std::max(t0, 0.0) / half_)) + 1;
        for (;; ++k) {
            const double te = static_cast<double>(k) * half_;
            if (te > stop || te >= t_off_) break;
            if (te > t0) out.push_back(te);
        }
    }
    if (std::isfinite(t_off_) && t_off_ > t0 && t_off_ <= t1) out.push_back(t_off_);
    return out;
}

double DriveWaveform::voltage_on(double t) const {
    const double A = signal_.amplitude;
    const double tr = signal_.tau_rise, tf = signal_.tau_fall;
    if (t <= 0.0) return 0.0;
    if (!bipolar_) return -A * std::expm1(-t / tr);

    const double h = half_;
    const auto K = static_cast<long long>(std::floor(t / h));
    // relaxation over many half periods forgets the start: jump in from the
    // periodic steady state when the history is long enough
    const double tmax = std::max(tr, tf);
    const auto memory = static_cast<long long>(std::ceil(40.0 * tmax / h)) + 2;
    long long start = 0;
    double v = 0.0;
    if (K > memory) {
        start = K - memory;
        const double er = std::exp(-h / tr), ef = std::exp(-h / tf);
        const double v_plus = A * (1.0 - 2.0 * er + ef * er) / (1.0 - ef * er);
        const double v_minus = -A + (v_plus + A) * ef;
        // value at edge `start`, the end of half period start-1
        v = ((start - 1) % 2 == 0) ? v_plus : v_minus;
    }
    for (long long j = start; j < K; ++j) {
        const double target = (j % 2 == 0) ? A : -A;
        const double tc = target > v ? tr : tf;
        v = target + (v - target) * std::exp(-h / tc);
    }
    const double target = (K % 2 == 0) ? A : -A;
    const double tc = target > v ? tr : tf;
    return target + (v - target) * std::exp(-(t - static_cast<double>(K) * h) / tc);
}

double DriveWaveform::voltage(double t) const {
    if (t <= 0.0) return 0.0;
    if (t <= t_off_) return voltage_on(t);
    return voltage_on(t_off_) * std::exp(-(t - t_off_) / signal_.tau_fall);
}

namespace {

// level(t) minus the sum of step residuals of every ideal edge up to t.
template <class Residual>
double superpose(const DriveWaveform& w, double tau, double t, Residual&& res) {
    if (t <= 0.0) return 0.0;
    const double t_off = w.t_off();
    double sum = res(t / tau);  // the switch-on edge, +1
    double level_before_off = 1.0;
    if (w.bipolar()) {
        const double h = w.half_period();
        const double last = std::min(t, t_off);
        auto K = static_cast<long long>(std::floor(last / h));
        if (static_cast<double>(K) * h >= t_off) --K;  // a flip coinciding with switch-off never happens
        level_before_off = (K % 2 == 0) ? 1.0 : -1.0;
        // flip k (1..K) at k*h carries 2(-1)^k; index by age m = K - k
        auto g = [&](long long m) { return 2.0 * res((t - static_cast<double>(K - m) * h) / tau); };
        auto sign = [&](long long m) { return ((K - m) % 2 == 0) ? 1.0 : -1.0; };
        double flips = 0.0;
        double gm = K > 0 ? g(0) : 0.0;
        for (long long m = 0; m < K; ++m) {
            flips += sign(m) * gm;
            const double gn = g(m + 1);
            if (K - (m + 1) >= 6) {
                const double gn2 = g(m + 2);
                if (gn - gn2 < kPairThreshold) {
                    // Euler estimate of the remaining alternating tail
                    const long long M = m + 1, N = K - M;
                    const double G0 = gn, G1 = gn2, G2 = g(M + 2), G3 = g(M + 3);
                    const double H0 = g(M + N), H1 = g(M + N + 1), H2 = g(M + N + 2), H3 = g(M + N + 3);
                    auto euler = [](double a, double b, double c, double d) {
                        return a / 2 - (b - a) / 4 + (c - 2 * b + a) / 8 - (d - 3 * c + 3 * b - a) / 16;
                    };
                    const double head = euler(G0, G1, G2, G3);
                    const double back = euler(H0, H1, H2, H3);
                    const double sN = (N % 2 == 0) ? 1.0 : -1.0;
                    flips += sign(M) * (head - sN * back);
                    break;
                }
            }
            gm = gn;
        }
        sum += flips;
    }
    if (t >= t_off) sum += -level_before_off * res((t - t_off) / tau);
    return w.level(t) - sum;
}

}  // namespace

DrivenDielectric::DrivenDielectric(const DielectricModel& m, const DriveWaveform& w,
                                   std::shared_ptr<const RelaxationKernel> kernel)
    : model_(m), wave_(w), kernel_(std::move(kernel)) {
    m.validate();
    if (!kernel_ || kernel_->alpha() != m.alpha) kernel_ = std::make_shared<RelaxationKernel>(m.alpha);
}

double DrivenDielectric::polarization(double t) const {
    if (!wave_.bipolar() && t < wave_.t_off()) return t <= 0.0 ? 0.0 : kernel_->fraction(t / model_.tau);
    return superpose(wave_, model_.tau, t, [this](double x) { return kernel_->residual(x); });
}

double DrivenDielectric::kappa(double t) const {
    const double p = std::min(1.0, std::abs(polarization(t)));
    return model_.kappa_inf + (model_.kappa_s - model_.kappa_inf) * p;
}

double polarization_exact(const DielectricModel& m, const DriveWaveform& w, double t) {
    const double a = m.alpha;
    if (!w.bipolar() && t < w.t_off()) return t <= 0.0 ? 0.0 : relaxation_fraction(a, t / m.tau);
    return superpose(w, m.tau, t, [a](double x) { return x <= 0.0 ? 1.0 : 1.0 - relaxation_fraction(a, x); });
}

double drive_voltage(const DriveSignal& s, double t) {
    if (!(t >= 0.0)) throw DomainError("drive_voltage: t must be >= 0");
    return DriveWaveform(s).voltage(t);
}

double effective_kappa(const DielectricModel& m, const DriveSignal& s, double t) {
    if (!(t >= 0.0)) throw DomainError("effective_kappa: t must be >= 0");
    m.validate();
    if (s.waveform == Waveform::dc) {
        s.validate();
        return cole_cole_step_response(m, t);
    }
    const double p = std::min(1.0, std::abs(polarization_exact(m, DriveWaveform(s), t)));
    return m.kappa_inf + (m.kappa_s - m.kappa_inf) * p;
}

}  // namespace eaclutch
