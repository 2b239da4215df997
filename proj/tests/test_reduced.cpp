#include <catch2/catch.hpp>

#include <random>

#include "celsim/lindblad.hpp"
#include "celsim/reduced.hpp"
#include "oracles.hpp"
#include "reduced_reference.hpp"

using namespace cel;

namespace {

double rel(const Complex a, const Complex b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace

TEST_CASE("atomic steady state collapses without drive") {
    SystemParams p = default_working_point();
    p.Omega = 0;
    const auto a = atom_steady_state(p);
    CHECK(a.rho_gg0 == Approx(1.0));
    CHECK(a.rho_ee0 == Approx(0.0).margin(1e-15));
    CHECK(std::abs(a.rho_gd0) < 1e-15);
}

TEST_CASE("atomic steady state strong-drive limit") {
    SystemParams p = default_working_point();
    const double Gamma2 = p.gamma33 + p.gamma32 + p.gamma31;
    p.Omega = 1e6 * Gamma2;
    const auto a = atom_steady_state(p);
    // gamma32 / (2 gamma21 + gamma32) = 3/6 with the device rates
    CHECK(a.rho_ee0 == Approx(p.gamma32 / (2 * p.gamma21 + p.gamma32)).epsilon(1e-9));
    CHECK(a.rho_ee0 == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("atomic steady state at the working point") {
    const SystemParams p = default_working_point();
    const auto a = atom_steady_state(p);
    CHECK(a.rho_gg0 + a.rho_ee0 + a.rho_dd0 == Approx(1.0).margin(1e-15));
    CHECK(std::abs(a.rho_gd0) <= 0.5);
    for (double v : {a.rho_gg0, a.rho_ee0, a.rho_dd0}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("atomic steady state matches a numeric three-level solve") {
    // full Lindblad on the bare atom (zero Fock space), couplings off
    SystemParams p = default_working_point();
    p.g1 = p.g2 = p.g3 = p.g4 = p.g5 = 0;
    p.phi = 0.7;
    const Truncation t{0, 0};
    const auto h = build_hamiltonian(p, FrameSpec::pump(), t);
    const auto rho = steady_state(liouvillian(h.static_part, collapse_operators(p, t)));
    const auto a = atom_steady_state(p);
    const int ig = t.index(0, Level::g, 0), ie = t.index(0, Level::e, 0),
              id = t.index(0, Level::d, 0);
    CHECK(rho.mat(ig, ig).real() == Approx(a.rho_gg0).epsilon(1e-10));
    CHECK(rho.mat(ie, ie).real() == Approx(a.rho_ee0).epsilon(1e-10));
    CHECK(rho.mat(id, id).real() == Approx(a.rho_dd0).epsilon(1e-10));
    CHECK(std::abs(rho.mat(ig, id) - a.rho_gd0) < 1e-12);
}

TEST_CASE("rho_ee grows monotonically with the drive") {
    SystemParams p = default_working_point();
    double prev = -1;
    for (double scale : {1e-2, 1e-1, 1.0, 1e1, 1e2}) {
        p.Omega = default_working_point().Omega * scale;
        const double ee = atom_steady_state(p).rho_ee0;
        CHECK(ee > prev);
        prev = ee;
    }
}

TEST_CASE("decay-rate identities") {
    const SystemParams p = default_working_point();
    const auto rc = coefficients(p);
    CHECK(rc.Gamma1 == p.gamma21 + p.gamma22);
    CHECK(rc.Gamma2 == p.gamma33 + p.gamma32 + p.gamma31);
    CHECK(rc.Gamma3 == p.gamma33 + p.gamma22 + p.gamma21 + p.gamma32 + p.gamma31);
}

TEST_CASE("coefficient proportionality structure") {
    SECTION("no drive kills mu and nu") {
        SystemParams p = default_working_point();
        p.Omega = 0;
        const auto rc = coefficients(p);
        CHECK(std::abs(rc.mu1) == 0.0);
        CHECK(std::abs(rc.mu2) == 0.0);
        CHECK(std::abs(rc.nu1) == 0.0);
        CHECK(std::abs(rc.nu2) == 0.0);
    }
    SECTION("g1 = 0 kills every mode-1-touching coefficient") {
        SystemParams p = default_working_point();
        p.g1 = 0;
        const auto rc = coefficients(p);
        CHECK(std::abs(rc.alpha2) == 0.0);
        CHECK(std::abs(rc.beta1) == 0.0);
        CHECK(std::abs(rc.beta2) == 0.0);
        CHECK(std::abs(rc.nu1) == 0.0);
        CHECK(std::abs(rc.nu2) == 0.0);
        CHECK(std::abs(rc.mu2) == 0.0);
    }
}

TEST_CASE("dual transcription agrees to 1e-12") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int trial = 0; trial < 12; ++trial) {
        SystemParams p = default_working_point();
        p.Omega *= u(gen);
        p.g1 *= u(gen);
        p.g2 *= u(gen);
        p.phi = u(gen);
        p.omega_p *= 0.999 + 0.002 * u(gen);
        const auto a = atom_steady_state(p);
        const auto ra = reduced_ref::atom(p);
        CHECK(rel(a.rho_gg0, ra.r11) < 1e-12);
        CHECK(rel(a.rho_ee0, ra.r22) < 1e-12);
        CHECK(rel(a.rho_dd0, ra.r33) < 1e-12);
        CHECK(rel(a.rho_gd0, ra.r13) < 1e-12);

        const auto rc = coefficients(p);
        const auto rk = reduced_ref::coeffs(p);
        CHECK(rel(rc.D1, rk.D1) < 1e-12);
        CHECK(rel(rc.D2, rk.D2) < 1e-12);
        CHECK(rel(rc.alpha1, rk.alpha1) < 1e-12);
        CHECK(rel(rc.alpha2, rk.alpha2) < 1e-12);
        CHECK(rel(rc.beta1, rk.beta1) < 1e-12);
        CHECK(rel(rc.beta2, rk.beta2) < 1e-12);
        CHECK(rel(rc.mu1, rk.mu1) < 1e-12);
        CHECK(rel(rc.mu2, rk.mu2) < 1e-12);
        CHECK(rel(rc.nu1, rk.nu1) < 1e-12);
        CHECK(rel(rc.nu2, rk.nu2) < 1e-12);
    }
}

TEST_CASE("moment rhs matches the reference transcription on random states") {
    std::mt19937 gen(23);
    std::normal_distribution<double> nd;
    const SystemParams p = default_working_point();
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    for (int trial = 0; trial < 20; ++trial) {
        MomentState s;
        s.m1 = Complex(nd(gen), nd(gen));
        s.m2 = Complex(nd(gen), nd(gen));
        s.n1 = std::abs(nd(gen)) * 3;
        s.n2 = std::abs(nd(gen)) * 2;
        s.c = Complex(nd(gen), nd(gen));
        const MomentState d = moment_rhs(s, rc, ass);
        const auto r = reduced_ref::moment_rhs(p, s.m1, s.m2, s.n1, s.n2, s.c);
        CHECK(rel(d.m1, r.da1) < 1e-12);
        CHECK(rel(d.m2, r.da2) < 1e-12);
        CHECK(rel(Complex(d.n1, 0), r.dn1) < 1e-12);
        CHECK(rel(Complex(d.n2, 0), r.dn2) < 1e-12);
        CHECK(rel(std::conj(d.c), r.dcs) < 1e-12);
        // conjugate-pair equations are the conjugates
        CHECK(rel(std::conj(r.da1), r.da1d) < 1e-15);
        CHECK(rel(std::conj(r.da2), r.da2d) < 1e-15);
        CHECK(std::abs(r.dn1.imag()) < 1e-12 * std::abs(r.dn1));
        CHECK(std::abs(r.dn2.imag()) < 1e-12 * std::abs(r.dn2));
    }
}

TEST_CASE("zero-state rhs is the constant source term") {
    const SystemParams p = default_working_point();
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    const MomentState d = moment_rhs(MomentState{}, rc, ass);
    const double want =
        2.0 * std::real(std::conj(rc.mu2) * ass.rho_gd0 + rc.alpha2 * ass.rho_dd0);
    CHECK(d.n1 == Approx(want).epsilon(1e-14));
    CHECK(d.n2 == Approx(2.0 * std::real(rc.alpha1) * ass.rho_ee0).epsilon(1e-14));
    CHECK(std::abs(d.m1) == 0.0);
    CHECK(std::abs(d.m2) == 0.0);
}

TEST_CASE("moment system is linear up to the constant source") {
    std::mt19937 gen(5);
    std::normal_distribution<double> nd;
    const SystemParams p = default_working_point();
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    auto pack = [](const MomentState &s) {
        return std::array<Complex, 5>{s.m1, s.m2, Complex(s.n1, 0), Complex(s.n2, 0), s.c};
    };
    const auto d0 = pack(moment_rhs(MomentState{}, rc, ass));
    for (int trial = 0; trial < 10; ++trial) {
        MomentState s1{Complex(nd(gen), nd(gen)), Complex(nd(gen), nd(gen)), nd(gen), nd(gen),
                       Complex(nd(gen), nd(gen))};
        MomentState s2{Complex(nd(gen), nd(gen)), Complex(nd(gen), nd(gen)), nd(gen), nd(gen),
                       Complex(nd(gen), nd(gen))};
        const double al = nd(gen), be = nd(gen);
        MomentState mix{al * s1.m1 + be * s2.m1, al * s1.m2 + be * s2.m2,
                        al * s1.n1 + be * s2.n1, al * s1.n2 + be * s2.n2,
                        al * s1.c + be * s2.c};
        const auto dm = pack(moment_rhs(mix, rc, ass));
        const auto d1 = pack(moment_rhs(s1, rc, ass));
        const auto d2 = pack(moment_rhs(s2, rc, ass));
        for (int k = 0; k < 5; ++k) {
            const Complex want = al * d1[k] + be * d2[k] - (al + be - 1.0) * d0[k];
            CHECK(std::abs(dm[k] - want) < 1e-6 * (std::abs(want) + 1.0));
        }
    }
}

TEST_CASE("moment integration trivial cases") {
    SystemParams p = default_working_point();
    p.g1 = p.g2 = 0;
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);

    SECTION("all couplings zero from vacuum stays zero") {
        const auto traj = integrate_moments(MomentState{}, rc, ass, {0, 1e-7, 1e-6});
        for (const auto &s : traj) {
            CHECK(s.n1 == 0.0);
            CHECK(s.n2 == 0.0);
            CHECK(std::abs(s.c) == 0.0);
        }
    }
    SECTION("bare decay of an initial photon number") {
        MomentState s0;
        s0.n1 = 3.0;
        const std::vector<double> grid{0, 0.5 / p.kappa1, 1.0 / p.kappa1};
        const auto traj = integrate_moments(s0, rc, ass, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(traj[i].n1 == Approx(3.0 * std::exp(-2 * p.kappa1 * grid[i])).epsilon(1e-8));
    }
}

TEST_CASE("moment integration converges to the linear fixed point") {
    const SystemParams p = default_working_point();
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    const auto sm = steady_moments(rc, ass);
    std::vector<double> grid{0};
    for (int i = 1; i <= 24; ++i) grid.push_back(i * 2e-7);
    const auto traj = integrate_moments(MomentState{}, rc, ass, grid);
    const auto &last = traj.back();
    CHECK(last.n1 == Approx(sm.n1).epsilon(1e-3));
    CHECK(last.n2 == Approx(sm.n2).epsilon(1e-3));
    CHECK(std::abs(last.c - sm.c) < 1e-3 * std::abs(sm.c));
    // relative drift < 1% over the last decade
    const auto &mid = traj[traj.size() / 2];
    CHECK(std::abs(last.n1 - mid.n1) / last.n1 < 0.01);
    CHECK(std::abs(last.n2 - mid.n2) / last.n2 < 0.01);
    // Cauchy-Schwarz along the way
    for (const auto &s : traj) CHECK(s.cauchy_schwarz_ok());
}

TEST_CASE("steady photon numbers at the working point") {
    const auto [n1, n2] = steady_photon_numbers(default_working_point());
    CHECK(n1 == Approx(5.0).epsilon(0.5));
    CHECK(n2 == Approx(2.0).epsilon(0.5));
    const double ratio = n1 / n2;
    CHECK(ratio > 2.0);
    CHECK(ratio < 4.0);
    const SystemParams p = default_working_point();
    const double f1 = n1 * p.kappa1, f2 = n2 * p.kappa2;
    CHECK(std::abs(f1 - f2) / std::max(f1, f2) < 0.30);
}

TEST_CASE("steady photon numbers vanish without drive") {
    SystemParams p = default_working_point();
    p.Omega = 0;
    const auto [n1, n2] = steady_photon_numbers(p);
    CHECK(n1 == Approx(0.0).margin(1e-12));
    CHECK(n2 == Approx(0.0).margin(1e-12));
}

TEST_CASE("unstable moment system is reported") {
    SystemParams p = default_working_point();
    p.g1 *= 8;
    p.g2 *= 8; // gain far above loss
    CHECK_THROWS_AS(steady_photon_numbers(p), solver_error);
    try {
        steady_photon_numbers(p);
    } catch (const solver_error &e) {
        CHECK(std::string(e.what()).find("abscissa") != std::string::npos);
    }
}

// Characterization of the moment model against the full Lindblad solver
// in the weak-coupling regime (g1, g2 x0.1, truncation 5x5). The closed
// moment equations land within a factor ~2 of the full model here (the
// pair-production channel is underrepresented); see KNOWN-DEVIATIONS.md.
// The spec-level 10% comparison lives in the acceptance suite, where it
// reports its measured deviation honestly.
TEST_CASE("moment model tracks the full solver within the known envelope") {
    SystemParams p = default_working_point();
    p.g1 *= 0.1;
    p.g2 *= 0.1;
    const Truncation t{5, 5};
    const auto h = build_hamiltonian(p, FrameSpec::slow(p), t);
    const Liouvillian L = liouvillian(h.static_part, collapse_operators(p, t));

    const double t_end = 3.0 / p.kappa1;
    std::vector<double> grid;
    for (int i = 1; i <= 6; ++i) grid.push_back(t_end * i / 6.0);
    EvolveOptions eopt;
    eopt.check_state = false;
    const auto traj = evolve(vacuum_state(t), L, grid, eopt);

    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    std::vector<double> mgrid{0};
    mgrid.insert(mgrid.end(), grid.begin(), grid.end());
    const auto mtraj = integrate_moments(MomentState{}, rc, ass, mgrid);

    const Operator n1op = number_op(1, t), n2op = number_op(2, t);
    const Operator a1a2 = annihilation(1, t) * annihilation(2, t);
    for (size_t i = 2; i < grid.size(); ++i) { // skip the atomic transient
        const double n1f = expectation(traj[i], n1op).real();
        const double n2f = expectation(traj[i], n2op).real();
        const auto &m = mtraj[i + 1];
        CHECK(n1f / m.n1 > 1.0);
        CHECK(n1f / m.n1 < 2.5);
        CHECK(n2f / m.n2 > 1.0);
        CHECK(n2f / m.n2 < 2.5);
        // the pair coherence itself agrees much more closely
        const Complex cf = expectation(traj[i], a1a2);
        CHECK(std::abs(m.c - cf) < 0.25 * std::abs(cf));
    }
}
