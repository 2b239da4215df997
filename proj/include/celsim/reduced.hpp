#pragma once

// Adiabatic-elimination model of the two cavity modes: atomic steady
// state, the alpha/beta/mu/nu coefficient set, and the closed set of
// first/second field-moment equations.
//
// Index-notation mapping used throughout: 1 <-> g, 2 <-> e, 3 <-> d
// (so gamma21 relaxes e -> g and omega21 is read as omega_eg).

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "celsim/errors.hpp"
#include "celsim/model.hpp"
#include "celsim/ode.hpp"

namespace cel {

struct AtomSteadyState {
    double rho_gg0 = 0;
    double rho_ee0 = 0;
    double rho_dd0 = 0; // complement, 1 - gg - ee
    Complex rho_gd0;

    Complex rho_dg0() const { return std::conj(rho_gd0); }
};

// Closed-form steady state of the pumped three-level atom alone.
// The coherence numerator carries a single power of the pump amplitude;
// see KNOWN-DEVIATIONS.md for the provenance of that reading.
inline AtomSteadyState atom_steady_state(const SystemParams &p) {
    p.validate();
    const Complex I(0, 1);
    const auto [Delta1, Delta2, Delta3] = detunings(p);
    (void)Delta1; (void)Delta3;
    const double Gamma2 = p.gamma33 + p.gamma32 + p.gamma31;
    const double den = (p.gamma31 + p.gamma32) * p.gamma21 *
                           (Delta2 * Delta2 + 0.25 * Gamma2 * Gamma2) +
                       p.Omega * p.Omega * Gamma2 * (2.0 * p.gamma21 + p.gamma32);
    if (!(den > 0))
        throw solver_error("atom_steady_state: vanishing denominator (all rates zero?)");
    AtomSteadyState s;
    s.rho_gg0 = ((p.gamma31 + p.gamma32) * p.gamma21 *
                     (Delta2 * Delta2 + 0.25 * Gamma2 * Gamma2) +
                 Gamma2 * p.gamma21 * p.Omega * p.Omega) /
                den;
    s.rho_ee0 = p.gamma32 * p.Omega * p.Omega * Gamma2 / den;
    s.rho_dd0 = 1.0 - s.rho_ee0 - s.rho_gg0;
    s.rho_gd0 = I * (p.gamma31 + p.gamma32) * p.gamma21 * (I * Delta2 + 0.5 * Gamma2) *
                p.Omega * std::exp(I * p.phi) / den;
    return s;
}

struct ReducedCoefficients {
    double Gamma1 = 0, Gamma2 = 0, Gamma3 = 0;
    Complex D1, D2;
    Complex alpha1, alpha2, beta1, beta2, mu1, mu2, nu1, nu2;
    double Delta1 = 0, Delta2 = 0, Delta3 = 0;
    double omega21 = 0; // alias of omega_eg
    double omega2 = 0;
    double kappa1 = 0, kappa2 = 0;
    double g1 = 0, g2 = 0;
};

inline ReducedCoefficients coefficients(const SystemParams &p) {
    p.validate();
    const Complex I(0, 1);
    ReducedCoefficients rc;
    const auto d = detunings(p);
    rc.Delta1 = d.Delta1;
    rc.Delta2 = d.Delta2;
    rc.Delta3 = d.Delta3;
    rc.omega21 = p.omega_eg;
    rc.omega2 = p.omega2;
    rc.kappa1 = p.kappa1;
    rc.kappa2 = p.kappa2;
    rc.g1 = p.g1;
    rc.g2 = p.g2;
    rc.Gamma1 = p.gamma21 + p.gamma22;
    rc.Gamma2 = p.gamma33 + p.gamma32 + p.gamma31;
    rc.Gamma3 = p.gamma33 + p.gamma22 + p.gamma21 + p.gamma32 + p.gamma31;

    const double O2 = p.Omega * p.Omega;
    rc.D1 = (I * rc.omega2 - I * rc.omega21 + 0.5 * rc.Gamma1) *
                (I * rc.omega2 + I * rc.Delta3 + 0.5 * rc.Gamma3) +
            O2;
    rc.D2 = (-I * rc.omega21 - I * rc.Delta1 + 0.5 * rc.Gamma1) *
                (I * rc.Delta3 - I * rc.Delta1 + 0.5 * rc.Gamma3) +
            O2;
    if (std::abs(rc.D1) == 0 || std::abs(rc.D2) == 0)
        throw solver_error("coefficients: vanishing denominator D1 or D2 at this "
                           "parameter point");

    rc.alpha1 = p.g2 * p.g2 / rc.D1 * (I * rc.Delta3 + 0.5 * rc.Gamma3 + I * rc.omega2);
    rc.alpha2 = p.g1 * p.g1 / rc.D2 * (-I * rc.omega21 + 0.5 * rc.Gamma1 - I * rc.Delta1);
    rc.beta1 = p.g1 * p.g2 / rc.D2 * (I * rc.Delta3 + 0.5 * rc.Gamma3 - I * rc.Delta1);
    rc.beta2 = p.g1 * p.g2 / std::conj(rc.D1) * (-I * rc.omega2 + I * rc.omega21 + 0.5 * rc.Gamma1);
    rc.mu1 = I * p.Omega * p.g2 * p.g2 / std::conj(rc.D1) * std::exp(-I * p.phi);
    rc.mu2 = I * p.Omega * p.g1 * p.g1 / std::conj(rc.D2) * std::exp(I * p.phi);
    rc.nu1 = I * p.Omega * p.g1 * p.g2 / std::conj(rc.D1) * std::exp(I * p.phi);
    rc.nu2 = I * p.Omega * p.g1 * p.g2 / std::conj(rc.D2) * std::exp(-I * p.phi);
    return rc;
}

// Tracked moments: m1 = <a1>, m2 = <a2>, n1 = <a1'a1>, n2 = <a2'a2>,
// c = <a1 a2> (the pair coherence; <a1'a2'> is its conjugate).
struct MomentState {
    Complex m1, m2;
    double n1 = 0, n2 = 0;
    Complex c;

    bool cauchy_schwarz_ok(double slack = 1e-6) const {
        return std::norm(c) <= (n1 + 1.0) * (n2 + 1.0) * (1.0 + slack) + slack;
    }
};

// Rotating frame the moments are expressed in. Pump keeps mode 2 at its
// full omega2 carrier (the frame of the printed equations); Slow removes
// it, leaving every tracked moment rotating at most at
// Delta1 + omega2 = omega1 + omega2 - omega_p. The pair coherence c is
// identical in both frames.
enum class MomentFrame { Pump, Slow };

namespace detail {

struct MomentTerms {
    // dn1/dt = gn1 n1 + 2 Re(K1 c) + S1
    // dn2/dt = gn2 n2 - 2 Re(K2 c) + S2
    // dcs/dt = gcs cs - K2 n1 + K1 n2 - S0      (cs = <a1'a2'> = conj c)
    double gn1 = 0, gn2 = 0, S1 = 0, S2 = 0;
    Complex K1, K2, S0, gcs;
    // dm1/dt = gm1 m1 + X1 conj(m2);  dm2/dt = gm2 m2 + X2 conj(m1)
    Complex gm1, gm2, X1, X2;
};

inline MomentTerms moment_terms(const ReducedCoefficients &rc, const AtomSteadyState &a,
                                MomentFrame frame) {
    const Complex I(0, 1);
    MomentTerms mt;
    const Complex rho_gd = a.rho_gd0, rho_dg = std::conj(a.rho_gd0);
    const double gg = a.rho_gg0, ee = a.rho_ee0, dd = a.rho_dd0;

    // photon-number and pair-coherence blocks
    mt.S1 = 2.0 * std::real(std::conj(rc.mu2) * rho_gd + rc.alpha2 * dd);
    mt.gn1 = -2.0 * rc.kappa1 +
             2.0 * std::real(std::conj(rc.mu2) * rho_gd + rc.alpha2 * dd - rc.alpha2 * ee);
    mt.K1 = rc.nu1 * gg - rc.nu1 * ee + rc.beta2 * rho_gd;
    mt.S2 = 2.0 * std::real(rc.alpha1) * ee;
    mt.gn2 = -2.0 * rc.kappa2 +
             2.0 * std::real(rc.alpha1 * ee - rc.alpha1 * gg - rc.mu1 * rho_gd);
    mt.K2 = rc.beta1 * rho_gd + std::conj(rc.nu2) * dd - std::conj(rc.nu2) * ee;
    mt.gcs = I * (rc.Delta1 + rc.omega2) - (rc.kappa1 + rc.kappa2) +
             rc.alpha1 * (ee - gg) + (rc.mu2 - std::conj(rc.mu1)) * rho_dg +
             rc.alpha2 * (dd - ee);
    mt.S0 = rc.beta1 * rho_gd + std::conj(rc.nu2) * dd + rc.nu1 * ee;

    // field-amplitude block, coefficient placement as printed
    const double rot1 = (frame == MomentFrame::Pump) ? rc.Delta1 : rc.Delta1 + rc.omega2;
    const double rot2 = (frame == MomentFrame::Pump) ? rc.omega2 : 0.0;
    mt.gm1 = -I * rot1 - rc.kappa1 + rc.g1 * rc.g1 / rc.D2 * rc.alpha2 * (dd - ee) -
             std::conj(rc.mu2) * rho_gd;
    mt.X1 = -std::conj(rc.nu1) * (ee - gg) - rc.g1 * rc.g2 / rc.D1 * rc.beta2 * rho_dg;
    mt.gm2 = -I * rot2 - rc.kappa2 + rc.g2 * rc.g2 / std::conj(rc.D1) * std::conj(rc.alpha1) * (ee - gg) -
             rc.mu1 * rho_gd;
    mt.X2 = -rc.g1 * rc.g2 / std::conj(rc.D2) * std::conj(rc.beta1) * rho_dg +
            rc.nu2 * (ee - dd);
    return mt;
}

} // namespace detail

// Time derivative of the tracked moments (pump frame by default, the
// frame the equations are printed in).
inline MomentState moment_rhs(const MomentState &s, const ReducedCoefficients &rc,
                              const AtomSteadyState &a, MomentFrame frame = MomentFrame::Pump) {
    const auto mt = detail::moment_terms(rc, a, frame);
    MomentState d;
    d.m1 = mt.gm1 * s.m1 + mt.X1 * std::conj(s.m2);
    d.m2 = mt.gm2 * s.m2 + mt.X2 * std::conj(s.m1);
    d.n1 = mt.gn1 * s.n1 + 2.0 * std::real(mt.K1 * s.c) + mt.S1;
    d.n2 = mt.gn2 * s.n2 - 2.0 * std::real(mt.K2 * s.c) + mt.S2;
    const Complex cs = std::conj(s.c);
    const Complex dcs = mt.gcs * cs - mt.K2 * s.n1 + mt.K1 * s.n2 - mt.S0;
    d.c = std::conj(dcs);
    return d;
}

// Integrates the moment ODEs on slow variables (MomentFrame::Slow), so
// no coefficient exceeds |Delta1 + omega2| in magnitude.
inline std::vector<MomentState> integrate_moments(const MomentState &s0,
                                                  const ReducedCoefficients &rc,
                                                  const AtomSteadyState &a,
                                                  const std::vector<double> &t_grid,
                                                  const OdeOptions &opt = {}) {
    using Vec = Eigen::Matrix<Complex, 5, 1>;
    const auto mt = detail::moment_terms(rc, a, MomentFrame::Slow);
    auto rhs = [&mt](double, const Vec &y) {
        Vec d;
        d(0) = mt.gm1 * y(0) + mt.X1 * std::conj(y(1));
        d(1) = mt.gm2 * y(1) + mt.X2 * std::conj(y(0));
        d(2) = mt.gn1 * y(2).real() + 2.0 * std::real(mt.K1 * y(4)) + mt.S1;
        d(3) = mt.gn2 * y(3).real() - 2.0 * std::real(mt.K2 * y(4)) + mt.S2;
        d(4) = std::conj(mt.gcs * std::conj(y(4)) - mt.K2 * y(2).real() +
                         mt.K1 * y(3).real() - mt.S0);
        return d;
    };
    Vec y0;
    y0 << s0.m1, s0.m2, Complex(s0.n1, 0), Complex(s0.n2, 0), s0.c;
    const auto traj = integrate_ode<Vec>(rhs, y0, t_grid, opt);
    std::vector<MomentState> out;
    out.reserve(traj.size());
    for (const Vec &y : traj)
        out.push_back({y(0), y(1), y(2).real(), y(3).real(), y(4)});
    return out;
}

struct SteadyMoments {
    double n1 = 0, n2 = 0;
    Complex c;
    double spectral_abscissa = 0; // max real part of the linear system
};

// Fixed point of the (n1, n2, c) block, solved directly. Throws when the
// linear system is unstable (positive spectral abscissa: no lasing
// steady state at this parameter point).
inline SteadyMoments steady_moments(const ReducedCoefficients &rc, const AtomSteadyState &a) {
    const auto mt = detail::moment_terms(rc, a, MomentFrame::Pump);
    Eigen::Matrix4cd A;
    Eigen::Vector4cd b;
    // unknowns x = (n1, n2, cs, c)
    A << mt.gn1, 0, std::conj(mt.K1), mt.K1,
         0, mt.gn2, -std::conj(mt.K2), -mt.K2,
         -mt.K2, mt.K1, mt.gcs, 0,
         -std::conj(mt.K2), std::conj(mt.K1), 0, std::conj(mt.gcs);
    b << -mt.S1, -mt.S2, mt.S0, std::conj(mt.S0);

    const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(A);
    const double abscissa = es.eigenvalues().real().maxCoeff();
    if (abscissa >= 0)
        throw solver_error("steady_moments: moment system is not stable at this point "
                           "(spectral abscissa " + std::to_string(abscissa) + " rad/s)");
    const Eigen::Vector4cd x = A.fullPivLu().solve(b);
    SteadyMoments s;
    s.n1 = x(0).real();
    s.n2 = x(1).real();
    s.c = x(3);
    s.spectral_abscissa = abscissa;
    return s;
}

inline std::pair<double, double> steady_photon_numbers(const SystemParams &p) {
    const auto s = steady_moments(coefficients(p), atom_steady_state(p));
    return {s.n1, s.n2};
}

} // namespace cel
