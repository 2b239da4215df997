#pragma once

// Fokker-Planck drift and diffusion coefficients for the difference
// phase theta = theta1 - theta2 and mean phase eta = (theta1 + theta2)/2
// of the two lasing fields, at fixed amplitudes r1, r2. A negative
// diffusion coefficient signals suppression of that phase's diffusion
// (the diffusion picture giving way to phase locking).

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "celsim/errors.hpp"
#include "celsim/model.hpp"
#include "celsim/ode.hpp"
#include "celsim/reduced.hpp"

namespace cel {

struct PolarState {
    double r1 = 1, r2 = 1; // field amplitudes, ~ sqrt(photon number)
    double eta = 0;        // mean phase, rad
    double theta = 0;      // difference phase, rad

    void validate() const {
        if (!(r1 > 0) || !(r2 > 0))
            throw config_error("PolarState: amplitudes must be positive "
                               "(coefficients diverge at zero amplitude)");
    }
};

struct DiffusionCoefficients {
    double d_theta = 0;      // drift, rad/s
    double d_eta = 0;        // drift, rad/s
    double d_thetatheta = 0; // diffusion, rad^2/s
    double d_etaeta = 0;
    double d_thetaeta = 0;
};

inline DiffusionCoefficients diffusion_coefficients(const ReducedCoefficients &rc,
                                                    const AtomSteadyState &a,
                                                    const PolarState &ps) {
    ps.validate();
    const Complex I(0, 1);
    const double r1 = ps.r1, r2 = ps.r2;
    const Complex e2 = std::exp(2.0 * I * ps.eta);
    const Complex em2 = std::exp(-2.0 * I * ps.eta);
    const double gg = a.rho_gg0, ee = a.rho_ee0, dd = a.rho_dd0;
    const Complex gd = a.rho_gd0, dg = a.rho_dg0();

    // the H.c. combinations are evaluated as written; the imaginary
    // residue must cancel (asserted below)
    auto hc = [](Complex z) { return z + std::conj(z); };

    const Complex cross = rc.beta1 * gd + std::conj(rc.nu2) * dd + rc.nu1 * ee;

    const Complex dtt = hc(rc.alpha1 * ee / (4.0 * r2 * r2) +
                           (rc.alpha2 * dd + rc.mu2 * dg) / (4.0 * r1 * r1)) -
                        hc(cross * e2 / (4.0 * r2 * r1));
    const Complex dee = hc(rc.alpha1 * ee / (16.0 * r2 * r2) +
                           (rc.alpha2 * dd + rc.mu2 * dg) / (16.0 * r1 * r1)) +
                        hc(cross * e2 / (16.0 * r2 * r1));
    const Complex dte = hc((rc.alpha2 * dd + std::conj(rc.mu2) * gd) / (4.0 * r1 * r1) -
                           rc.alpha1 * ee / (4.0 * r2 * r2));

    const Complex eta_a =
        (std::conj(rc.alpha2) + std::conj(rc.alpha1)) * ee + (rc.alpha1 * gg - rc.mu1 * gd);
    const Complex deta = 0.5 * (rc.Delta1 + rc.omega2) +
                         I / 4.0 * (eta_a - std::conj(eta_a)) +
                         hc(I / 4.0 * (rc.alpha2 * dd - rc.mu2 * dg)) +
                         hc(I * r2 / (4.0 * r1) * (rc.nu1 * ee - rc.beta2 * gd - rc.nu1 * gg) * e2) +
                         hc(I * r1 / (4.0 * r2) *
                            (rc.beta1 * gd + std::conj(rc.nu2) * dd - std::conj(rc.nu2) * ee) * e2) +
                         hc(I / (4.0 * r2 * r1) *
                            (std::conj(rc.beta1) * dg + rc.nu2 * dd + std::conj(rc.nu1) * ee) * em2);

    const Complex dtheta = (rc.Delta1 + rc.omega2) +
                           hc(I / 2.0 * (rc.alpha2 * (dd - ee) - rc.mu2 * dg)) +
                           hc(I / 2.0 * (rc.mu1 * gd - rc.alpha1 * (gg - ee))) +
                           hc(I * r1 / (2.0 * r2) *
                              (std::conj(rc.nu2) * (ee - dd) - rc.beta1 * gd) * e2) +
                           hc(I * r2 / (2.0 * r1) * (rc.nu1 * (ee - gg) - rc.beta2 * gd) * e2);

    auto realize = [](Complex z, const char *name) {
        if (std::abs(z.imag()) > 1e-12 * (std::abs(z.real()) + 1.0))
            throw solver_error(std::string("diffusion_coefficients: imaginary residue in ") +
                               name);
        return z.real();
    };
    DiffusionCoefficients out;
    out.d_thetatheta = realize(dtt, "D_thetatheta");
    out.d_etaeta = realize(dee, "D_etaeta");
    out.d_thetaeta = realize(dte, "D_thetaeta");
    out.d_eta = realize(deta, "D_eta");
    out.d_theta = realize(dtheta, "D_theta");
    return out;
}

// Drift equations d theta/dt = D_theta, d eta/dt = D_eta at fixed
// amplitudes. Only eta feeds back into the coefficients.
inline std::vector<PolarState> phase_drift_odes(const PolarState &ps0,
                                                const ReducedCoefficients &rc,
                                                const AtomSteadyState &a,
                                                const std::vector<double> &t_grid,
                                                const OdeOptions &opt = {}) {
    ps0.validate();
    using Vec = Eigen::Vector2d; // (theta, eta)
    auto rhs = [&](double, const Vec &y) {
        PolarState ps{ps0.r1, ps0.r2, y(1), y(0)};
        const auto dc = diffusion_coefficients(rc, a, ps);
        return Vec(dc.d_theta, dc.d_eta);
    };
    const auto traj = integrate_ode<Vec>(rhs, Vec(ps0.theta, ps0.eta), t_grid, opt);
    std::vector<PolarState> out;
    out.reserve(traj.size());
    for (const Vec &y : traj) out.push_back({ps0.r1, ps0.r2, y(1), y(0)});
    return out;
}

struct EtaFixedPoint {
    double eta = 0;
    double slope = 0; // dD_eta/deta; negative = attracting for deta/dt = +D_eta
    double d_etaeta = 0;

    bool stable() const { return slope < 0; }
};

// Roots of D_eta(eta) on [0, 2 pi), located by sign changes on a fine
// grid plus bisection. |D_eta| < drift_tol at a root counts as locked.
inline std::vector<EtaFixedPoint> eta_fixed_points(const ReducedCoefficients &rc,
                                                   const AtomSteadyState &a, double r1,
                                                   double r2, int grid = 4096) {
    auto deta = [&](double eta) {
        return diffusion_coefficients(rc, a, {r1, r2, eta, 0.0}).d_eta;
    };
    std::vector<EtaFixedPoint> out;
    double prev = deta(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double eta = tau * i / grid;
        const double cur = deta(eta);
        if (prev == 0.0 || (prev < 0) != (cur < 0)) {
            double lo = tau * (i - 1) / grid, hi = eta;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((deta(lo) < 0) != (deta(mid) < 0)) hi = mid;
                else lo = mid;
            }
            const double root = 0.5 * (lo + hi);
            const double h = tau / (8.0 * grid);
            EtaFixedPoint fp;
            fp.eta = root;
            fp.slope = (deta(root + h) - deta(root - h)) / (2.0 * h);
            fp.d_etaeta = diffusion_coefficients(rc, a, {r1, r2, root, 0.0}).d_etaeta;
            out.push_back(fp);
        }
        prev = cur;
    }
    return out;
}

// Modified Schawlow-Townes linewidth (kappa1 + kappa2) / (2 N_tot).
inline double schawlow_townes(double kappa1, double kappa2, double n_tot) {
    if (!(n_tot > 0)) throw config_error("schawlow_townes: photon number must be positive");
    return (kappa1 + kappa2) / (2.0 * n_tot);
}

} // namespace cel
