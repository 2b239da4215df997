#pragma once

// Physical parameters of the driven atom-resonator system: two resonator
// modes coupled through a three-level artificial atom (levels g, e, d)
// whose g-d transition is pumped classically.
//
// Unit convention: configuration files store ordinary frequencies in Hz;
// everything in memory is an angular frequency in rad/s. The only
// conversion boundary is io.hpp.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "celsim/errors.hpp"

namespace cel {

using Complex = std::complex<double>;

inline constexpr double tau = 2.0 * std::numbers::pi; // one turn, rad
inline constexpr double hbar = 1.054571817e-34;       // J s

struct SystemParams {
    // mode angular frequencies
    double omega1 = 0;
    double omega2 = 0;
    // atomic transition angular frequencies (omega_de = omega_dg - omega_eg)
    double omega_eg = 0;
    double omega_dg = 0;
    // pump
    double omega_p = 0; // pump angular frequency
    double Omega = 0;   // pump Rabi amplitude
    double phi = 0;     // pump phase, rad
    // coupling strengths
    double g1 = 0, g2 = 0, g3 = 0, g4 = 0, g5 = 0;
    // cavity amplitude decay rates
    double kappa1 = 0, kappa2 = 0;
    // atomic relaxation/dephasing rates
    double gamma21 = 0, gamma22 = 0, gamma31 = 0, gamma32 = 0, gamma33 = 0;

    double omega_de() const { return omega_dg - omega_eg; }

    void validate() const {
        auto nonneg = [](double v, const char *name) {
            if (!(v >= 0))
                throw config_error(std::string("SystemParams: ") + name + " must be >= 0");
        };
        auto positive = [](double v, const char *name) {
            if (!(v > 0))
                throw config_error(std::string("SystemParams: ") + name + " must be > 0");
        };
        positive(omega1, "omega1");
        positive(omega2, "omega2");
        positive(omega_eg, "omega_eg");
        positive(omega_dg, "omega_dg");
        positive(omega_p, "omega_p");
        nonneg(Omega, "Omega");
        nonneg(g1, "g1"); nonneg(g2, "g2"); nonneg(g3, "g3");
        nonneg(g4, "g4"); nonneg(g5, "g5");
        nonneg(kappa1, "kappa1"); nonneg(kappa2, "kappa2");
        nonneg(gamma21, "gamma21"); nonneg(gamma22, "gamma22");
        nonneg(gamma31, "gamma31"); nonneg(gamma32, "gamma32");
        nonneg(gamma33, "gamma33");
        if (!(omega_dg > omega_eg))
            throw config_error("SystemParams: level ordering requires omega_dg > omega_eg");
    }
};

// Flux dispersion of the e-g transition near a half-integer flux point:
//   omega_eg(delta_phi) = sqrt((ip_slope * delta_phi)^2 + gap_delta^2).
// The weak flux dependence of the gap itself is neglected.
struct FluxParams {
    double gap_delta = 0; // tunneling gap as angular frequency, rad/s
    double ip_slope = 0;  // 2 I_p Phi_0 / hbar as angular frequency per (dPhi/Phi_0)
    int phi_n_index = 0;  // N of the half-integer flux point Phi_N = (N + 1/2) Phi_0
    double delta_phi = 0; // flux bias in units of Phi_0

    void validate() const {
        if (!(gap_delta > 0))
            throw config_error("FluxParams: gap_delta must be > 0");
        if (!(ip_slope > 0))
            throw config_error("FluxParams: ip_slope must be > 0");
        if (!(std::abs(delta_phi) < 0.1))
            throw config_error("FluxParams: first-order dispersion needs |delta_phi| << 1 "
                               "(enforced |delta_phi| < 0.1)");
    }
};

struct Detunings {
    double Delta1 = 0; // omega1 - omega_p
    double Delta2 = 0; // omega_dg - omega_p
    double Delta3 = 0; // omega_dg - omega_p - omega_eg
};

inline Detunings detunings(const SystemParams &p) {
    return {p.omega1 - p.omega_p, p.omega_dg - p.omega_p,
            p.omega_dg - p.omega_p - p.omega_eg};
}

inline double transition_frequency(const FluxParams &f) {
    f.validate();
    return std::hypot(f.ip_slope * f.delta_phi, f.gap_delta);
}

// Inverts the dispersion law: the slope that puts the transition at
// omega_eg_target for the given bias. The persistent current is not an
// independently known constant here; the returned value is derived from
// the chosen operating point and should be reported as such.
inline double derive_ip_slope(double omega_eg_target, double gap_delta, double delta_phi) {
    if (!(omega_eg_target > gap_delta))
        throw config_error("derive_ip_slope: target frequency must exceed the gap");
    if (delta_phi == 0)
        throw config_error("derive_ip_slope: delta_phi must be nonzero");
    return std::sqrt(omega_eg_target * omega_eg_target - gap_delta * gap_delta) /
           std::abs(delta_phi);
}

// Rotating-frame specification. The generator is
//   nu1 a1'a1 + nu2 a2'a2 + nu2 sigma_ee + omega_p sigma_dd,
// time independent only when nu1 + nu2 = omega_p. Pump is the special
// case (nu1, nu2) = (omega_p, 0); Slow = (omega_p - omega2, omega2)
// removes the ~2pi x 12 GHz carrier from mode 2.
struct FrameSpec {
    enum class Kind { Lab, Pump, CoRotating };
    Kind kind = Kind::Pump;
    double nu1 = 0, nu2 = 0;

    static FrameSpec lab() { return {Kind::Lab, 0, 0}; }
    static FrameSpec pump() { return {Kind::Pump, 0, 0}; }
    static FrameSpec co_rotating(double nu1, double nu2, const SystemParams &p) {
        const double sum = nu1 + nu2;
        if (std::abs(sum - p.omega_p) > 1e-9 * std::abs(p.omega_p))
            throw config_error("FrameSpec: co-rotating frame needs nu1 + nu2 = omega_p "
                               "(otherwise H stays time dependent)");
        return {Kind::CoRotating, nu1, nu2};
    }
    static FrameSpec slow(const SystemParams &p) {
        return co_rotating(p.omega_p - p.omega2, p.omega2, p);
    }

    std::string name() const {
        switch (kind) {
        case Kind::Lab: return "lab";
        case Kind::Pump: return "pump";
        default: return "co_rotating(nu1=" + std::to_string(nu1) +
                        ",nu2=" + std::to_string(nu2) + ")";
        }
    }
};

// CEL operating point: mode/transition frequencies, pump, couplings and
// decay rates of the measured device.
inline SystemParams default_working_point() {
    SystemParams p;
    p.omega1 = tau * 6.0016e9;
    p.omega2 = tau * 11.9979e9;
    p.omega_eg = tau * 11.4979e9;
    p.omega_dg = tau * (11.4979e9 + 6.5376e9);
    p.omega_p = tau * 18.0055e9;
    p.Omega = tau * 900e6;
    p.phi = 0.0;
    p.g1 = tau * 90e6;
    p.g2 = tau * 78e6;
    p.g3 = tau * 36e6;
    p.g4 = tau * 205e6;
    p.g5 = tau * 225e6;
    p.kappa1 = tau * 0.63e6;
    p.kappa2 = tau * 1.94e6;
    p.gamma21 = tau * 1.5e6;
    p.gamma22 = tau * 6e6;
    p.gamma31 = tau * 8e6;
    p.gamma32 = tau * 3e6;
    p.gamma33 = tau * 4e6;
    p.validate();
    return p;
}

// Flux parameters reproducing the working point: gap 2pi x 1.51 GHz, bias
// -18e-3 Phi_0, slope derived so omega_eg lands on 2pi x 11.4979 GHz.
inline FluxParams default_flux_params() {
    FluxParams f;
    f.gap_delta = tau * 1.51e9;
    f.phi_n_index = 1;
    f.delta_phi = -18e-3;
    f.ip_slope = derive_ip_slope(tau * 11.4979e9, f.gap_delta, f.delta_phi);
    return f;
}

} // namespace cel
