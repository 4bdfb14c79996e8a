#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace eaclutch {

struct DielectricModel {
    double kappa_inf = 4.0;
    double kappa_s = 54.2;
    double tau = 2.82e-6;        // s
    double alpha = 0.562;
    double density = 1900.0;     // kg/m^3
    double thickness = 24e-6;    // m
    double conductivity = 1e-11; // S/m

    void validate() const;
};

enum class Waveform { dc, bipolar_square };

struct DriveSignal {
    Waveform waveform = Waveform::bipolar_square;
    double amplitude = 300.0;  // V
    double frequency = 1000.0; // Hz, ignored for dc
    double tau_rise = 8.3e-6 / 2.1972245773362196;
    double tau_fall = 5.2e-6 / 2.1972245773362196;

    void validate() const;
    /// First-order time constant whose 10-90 % transition takes t1090.
    static double tau_from_transition(double t1090);
};

/// Complex relative permittivity at angular frequency omega.
std::complex<double> cole_cole_kappa(const DielectricModel& m, double omega);

/// Fraction of the slow polarization present a time x = t/tau after a unit
/// step: x^a E_{a,a+1}(-x^a). Equals 1 - E_a(-x^a).
double relaxation_fraction(double alpha, double x);

/// Permittivity seen a time t after a field step (kappa_inf at t = 0).
double cole_cole_step_response(const DielectricModel& m, double t);

struct PermittivityPoint {
    double frequency_hz;
    double kappa_real;
};

struct ColeColeFit {
    double kappa_s = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
    double se_kappa_s = 0.0;
    double se_tau = 0.0;
    double se_alpha = 0.0;
    double residual_norm = 0.0;
    bool clamped = false;
};

/// Least-squares fit of Re kappa(omega) with kappa_inf held fixed.
ColeColeFit fit_cole_cole(std::span<const PermittivityPoint> data, double kappa_inf);

/// Tabulated 1 - E_a(-x^a) and its complement, for repeated evaluation
/// inside time stepping. Immutable after construction.
class RelaxationKernel {
public:
    explicit RelaxationKernel(double alpha);

    double alpha() const { return alpha_; }
    /// E_a(-x^a), the part of a step still missing at x = t/tau.
    double residual(double x) const;
    double fraction(double x) const { return 1.0 - residual(x); }

private:
    double alpha_;
    double u0_, du_;
    std::vector<double> val_, der_;  // residual and d residual / d ln x
    double small_c_[3];
    double large_c_[3];
};

/// Ideal square levels and the RC-filtered drive voltage for one
/// voltage-on/voltage-off episode. Voltage turns on at t = 0 and, if t_off is
/// finite, off at t_off.
class DriveWaveform {
public:
    explicit DriveWaveform(const DriveSignal& s, double t_off = std::numeric_limits<double>::infinity());

    double level(double t) const;
    double voltage(double t) const;
    /// Ideal level transitions in (t0, t1], voltage-off included.
    std::vector<double> edges(double t0, double t1) const;

    bool bipolar() const { return bipolar_; }
    double half_period() const { return half_; }
    double t_off() const { return t_off_; }
    const DriveSignal& signal() const { return signal_; }

private:
    double voltage_on(double t) const;

    DriveSignal signal_;
    double t_off_;
    double half_;
    bool bipolar_;
};

/// Edge-superposed polarization of a Cole-Cole dielectric under a
/// DriveWaveform.
class DrivenDielectric {
public:
    DrivenDielectric(const DielectricModel& m, const DriveWaveform& w,
                     std::shared_ptr<const RelaxationKernel> kernel = nullptr);

    /// Signed slow-polarization state in units of the saturated value.
    double polarization(double t) const;
    double kappa(double t) const;
    double voltage(double t) const { return wave_.voltage(t); }

    const DielectricModel& dielectric() const { return model_; }
    const DriveWaveform& waveform() const { return wave_; }
    const RelaxationKernel& kernel() const { return *kernel_; }
    std::shared_ptr<const RelaxationKernel> shared_kernel() const { return kernel_; }

private:
    DielectricModel model_;
    DriveWaveform wave_;
    std::shared_ptr<const RelaxationKernel> kernel_;
};

/// Polarization from the same superposition with every residual computed
/// directly from the Mittag-Leffler function (no table).
double polarization_exact(const DielectricModel& m, const DriveWaveform& w, double t);

/// Voltage for a drive that stays on.
double drive_voltage(const DriveSignal& s, double t);

/// Effective permittivity under a drive that stays on, evaluated from the
/// Mittag-Leffler function directly.
double effective_kappa(const DielectricModel& m, const DriveSignal& s, double t);

}  // namespace eaclutch
