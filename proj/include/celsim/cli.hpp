#pragma once

// Command-line front end: configuration parsing, dispatch to the
// simulation kernels, and CSV/report output.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure,
// 4 output I/O failure.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "celsim/correlation.hpp"
#include "celsim/errors.hpp"
#include "celsim/hilbert.hpp"
#include "celsim/io.hpp"
#include "celsim/lindblad.hpp"
#include "celsim/model.hpp"
#include "celsim/phase.hpp"
#include "celsim/reduced.hpp"
#include "celsim/spectroscopy.hpp"
#include "celsim/sweep.hpp"

namespace cel {

struct RunConfig {
    std::string command; // steady | evolve | transmit | sweep | duan | diffusion | params
    std::string params_file;
    std::string out;
    Truncation trunc{15, 10};
    std::string frame = "slow"; // pump | slow
    double tol = 1e-9;
    int jobs = 1;

    // steady / evolve / sweep
    std::string model = "reduced"; // reduced | full
    bool check_convergence = false; // re-solve at (+4,+4) and report the shifts

    // evolve / duan
    double t_max = 3e-6;
    int points = 400;

    // transmit
    double wd_from_hz = 0, wd_to_hz = 0;
    int wd_n = 0;
    double n_probe = 0.01;
    double flux_from = 0, flux_to = 0;
    int flux_n = 0;
    std::string convention = "derived"; // derived | printed
    std::string gap;                    // g1..g5: print a gap report instead

    // diffusion
    double r1 = 0, r2 = 0; // 0: use sqrt of the reduced steady photon numbers
    int eta_n = 361;

    // sweep
    std::vector<SweepAxis> sweep_axes;

    uint64_t seed = 0; // reserved for reproducibility of randomized tooling
};

namespace detail {

inline ProbeLevelShift convention_of(const RunConfig &cfg) {
    if (cfg.convention == "derived") return ProbeLevelShift::FrameDerived;
    if (cfg.convention == "printed") return ProbeLevelShift::AsPrinted;
    throw config_error("unknown probe convention: " + cfg.convention);
}

inline FrameSpec frame_of(const RunConfig &cfg, const SystemParams &p) {
    if (cfg.frame == "pump") return FrameSpec::pump();
    if (cfg.frame == "slow") return FrameSpec::slow(p);
    throw config_error("unknown frame: " + cfg.frame + " (use pump or slow)");
}

inline std::vector<double> linspace(double from, double to, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? from : from + (to - from) * double(i) / double(n - 1);
    return v;
}

inline void write_param_header(CsvWriter &csv, const RunConfig &cfg, const SystemParams &p,
                               const std::string &frame_note) {
    csv.comment("celsim " + cfg.command);
    for (const auto &[key, value] : params_as_hz(p))
        csv.comment(key + " = " + format_g12(value));
    csv.comment("frame = " + frame_note);
    csv.comment("trunc = " + std::to_string(cfg.trunc.n1_max) + "," +
                std::to_string(cfg.trunc.n2_max));
}

inline ResolvedParams load_params(const RunConfig &cfg) {
    if (cfg.params_file.empty()) return resolve_params({});
    return resolve_params(read_param_file(cfg.params_file));
}

inline int cmd_params(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    for (const auto &[key, value] : params_as_hz(rp.system))
        os << key << " = " << format_g12(value) << "\n";
    os << "# flux model (ip_slope derived from the working point, not a measured constant)\n";
    os << "gap_delta = " << format_g12(rp.flux.eg.gap_delta / tau) << "\n";
    os << "ip_slope = " << format_g12(rp.flux.eg.ip_slope / tau) << "\n";
    os << "delta_phi = " << format_g12(rp.flux.eg.delta_phi) << "\n";
    if (!cfg.out.empty()) {
        CsvWriter w(cfg.out);
        for (const auto &[key, value] : params_as_hz(rp.system))
            w.row({key + " = " + format_g12(value)});
        w.close();
    }
    return 0;
}

inline int cmd_steady(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    const SystemParams &p = rp.system;
    double n1, n2;
    Complex c;
    std::string frame_note;
    if (cfg.model == "full") {
        const FrameSpec fr = frame_of(cfg, p);
        frame_note = fr.name();
        const auto h = build_hamiltonian(p, fr, cfg.trunc);
        const auto rho = steady_state(liouvillian(h.static_part,
                                                  collapse_operators(p, cfg.trunc)));
        const auto f = field_observables(rho);
        n1 = f.n1; n2 = f.n2; c = f.a1a2;
        os << "p_g = " << format_g12(f.p_g) << "\np_e = " << format_g12(f.p_e)
           << "\np_d = " << format_g12(f.p_d) << "\n";
        if (cfg.check_convergence) {
            const auto tc = steady_truncation_check(p, fr, cfg.trunc, 4);
            os << "n1_shift_plus4 = " << format_g12(tc.shift_n1) << "\n"
               << "n2_shift_plus4 = " << format_g12(tc.shift_n2) << "\n";
            if (!tc.converged())
                os << "# warning: photon numbers shift by more than 1% at (+4,+4); "
                      "increase --trunc\n";
        }
    } else if (cfg.model == "reduced") {
        frame_note = "pump (pair coherence identical in any nu1+nu2=omega_p frame)";
        const auto sm = steady_moments(coefficients(p), atom_steady_state(p));
        n1 = sm.n1; n2 = sm.n2; c = sm.c;
    } else {
        throw config_error("unknown model: " + cfg.model);
    }
    os << "n1 = " << format_g12(n1) << "\nn2 = " << format_g12(n2) << "\n"
       << "re_c = " << format_g12(c.real()) << "\nim_c = " << format_g12(c.imag()) << "\n"
       << "imbalance = " << format_g12(energy_balance(n1, n2, p.kappa1, p.kappa2).imbalance)
       << "\n";
    if (!cfg.out.empty()) {
        CsvWriter csv(cfg.out);
        write_param_header(csv, cfg, p, frame_note);
        csv.header({"n1", "n2", "re_c", "im_c", "imbalance"});
        csv.row({format_g12(n1), format_g12(n2), format_g12(c.real()), format_g12(c.imag()),
                 format_g12(energy_balance(n1, n2, p.kappa1, p.kappa2).imbalance)});
        csv.close();
    }
    return 0;
}

inline int cmd_evolve(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    const SystemParams &p = rp.system;
    if (cfg.out.empty()) throw config_error("evolve: --out is required");
    std::vector<double> grid = linspace(0.0, cfg.t_max, std::max(2, cfg.points));

    if (cfg.model == "reduced") {
        OdeOptions oopt;
        oopt.rtol = cfg.tol;
        const auto rc = coefficients(p);
        const auto ass = atom_steady_state(p);
        const auto traj = integrate_moments(MomentState{}, rc, ass, grid, oopt);
        CsvWriter csv(cfg.out);
        write_param_header(csv, cfg, p, "slow co-rotating (nu1=omega_p-omega2, nu2=omega2)");
        csv.header({"t", "re_m1", "im_m1", "re_m2", "im_m2", "n1", "n2", "re_c", "im_c"});
        for (size_t i = 0; i < traj.size(); ++i) {
            const auto &s = traj[i];
            csv.row({format_g12(grid[i]), format_g12(s.m1.real()), format_g12(s.m1.imag()),
                     format_g12(s.m2.real()), format_g12(s.m2.imag()), format_g12(s.n1),
                     format_g12(s.n2), format_g12(s.c.real()), format_g12(s.c.imag())});
        }
        csv.close();
        os << "wrote " << traj.size() << " points to " << cfg.out << "\n";
        return 0;
    }
    if (cfg.model != "full") throw config_error("unknown model: " + cfg.model);

    const FrameSpec fr = frame_of(cfg, p);
    const auto h = build_hamiltonian(p, fr, cfg.trunc);
    const auto L = liouvillian(h.static_part, collapse_operators(p, cfg.trunc));
    EvolveOptions eopt;
    eopt.tol = std::min(cfg.tol, 1e-10);
    eopt.check_state = cfg.trunc.dim() <= 200; // positivity eigensolve cost
    std::vector<double> tg(grid.begin() + 1, grid.end());
    const auto traj = evolve(vacuum_state(cfg.trunc), L, tg, eopt);

    CsvWriter csv(cfg.out);
    write_param_header(csv, cfg, p, fr.name());
    csv.header({"t", "trace", "n1", "n2", "p_g", "p_e", "p_d", "re_a1", "im_a1", "re_a2",
                "im_a2"});
    auto emit = [&](double tpt, const DensityMatrix &rho) {
        const auto f = field_observables(rho);
        csv.row({format_g12(tpt), format_g12(rho.trace().real()), format_g12(f.n1),
                 format_g12(f.n2), format_g12(f.p_g), format_g12(f.p_e), format_g12(f.p_d),
                 format_g12(f.a1.real()), format_g12(f.a1.imag()), format_g12(f.a2.real()),
                 format_g12(f.a2.imag())});
    };
    emit(0.0, vacuum_state(cfg.trunc));
    for (size_t i = 0; i < traj.size(); ++i) emit(tg[i], traj[i]);
    csv.close();
    os << "wrote " << traj.size() + 1 << " points to " << cfg.out << "\n";
    return 0;
}

inline int cmd_transmit(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    const SystemParams &p = rp.system;
    const ProbeLevelShift shift = convention_of(cfg);

    if (!cfg.gap.empty()) {
        Interaction which;
        if (cfg.gap == "g1") which = Interaction::G1;
        else if (cfg.gap == "g2") which = Interaction::G2;
        else if (cfg.gap == "g3") which = Interaction::G3;
        else if (cfg.gap == "g4") which = Interaction::G4;
        else if (cfg.gap == "g5") which = Interaction::G5;
        else throw config_error("unknown interaction for --gap: " + cfg.gap);
        const double gap = anticrossing_gap(p, which, cfg.trunc, shift);
        os << "interaction = " << cfg.gap << "\n"
           << "gap_hz = " << format_g12(gap / tau) << "\n"
           << "gap_over_2_hz = " << format_g12(gap / (2 * tau)) << "\n";
        if (!cfg.out.empty()) {
            CsvWriter w(cfg.out);
            write_param_header(w, cfg, p, "probe rotating frame, convention " + cfg.convention);
            w.row({"interaction = " + cfg.gap});
            w.row({"gap_hz = " + format_g12(gap / tau)});
            w.row({"gap_over_2_hz = " + format_g12(gap / (2 * tau))});
            w.close();
        }
        return 0;
    }

    if (cfg.out.empty()) throw config_error("transmit: --out is required");
    if (cfg.wd_n < 1) throw config_error("transmit: probe grid is empty (--wd-n)");
    const auto wd = linspace(tau * cfg.wd_from_hz, tau * cfg.wd_to_hz, cfg.wd_n);

    std::vector<TransmissionPoint> pts;
    if (cfg.flux_n > 0) {
        const auto dphi = linspace(cfg.flux_from, cfg.flux_to, cfg.flux_n);
        pts = flux_sweep(p, rp.flux, dphi, wd, cfg.n_probe, cfg.trunc, shift, cfg.jobs);
    } else {
        pts.reserve(wd.size());
        double t0 = 0;
        bool warned = false;
        for (double w : wd) {
            TransmissionPoint tp;
            tp.omega_d = w;
            tp.delta_phi = rp.flux.eg.delta_phi;
            TransmissionDiagnostics diag;
            tp.t = transmission(p, w, cfg.n_probe, cfg.trunc, shift, &diag);
            if (diag.truncation_warning && !warned) {
                std::cerr << "warning: probe occupation " << diag.n2_occupation
                          << " approaches n2_max = " << cfg.trunc.n2_max
                          << "; lower --n-probe or raise --trunc\n";
                warned = true;
            }
            t0 = std::max(t0, std::abs(tp.t));
            pts.push_back(tp);
        }
        for (auto &tp : pts) tp.t_normalized = t0 > 0 ? std::abs(tp.t) / t0 : 0;
    }
    CsvWriter csv(cfg.out);
    write_param_header(csv, cfg, p, "probe rotating frame at omega_d, convention " +
                                        cfg.convention);
    csv.header({"delta_phi", "omega_d_hz", "re_t", "im_t", "abs_t_norm"});
    for (const auto &tp : pts)
        csv.row({format_g12(tp.delta_phi), format_g12(tp.omega_d / tau),
                 format_g12(tp.t.real()), format_g12(tp.t.imag()),
                 format_g12(tp.t_normalized)});
    csv.close();
    os << "wrote " << pts.size() << " points to " << cfg.out << "\n";
    return 0;
}

inline int cmd_duan(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    const SystemParams &p = rp.system;
    if (cfg.out.empty()) throw config_error("duan: --out is required");
    OdeOptions oopt;
    oopt.rtol = cfg.tol;
    const auto grid = linspace(0.0, cfg.t_max, std::max(2, cfg.points));
    const auto traj = duan_trajectory(p, grid, oopt);
    CsvWriter csv(cfg.out);
    write_param_header(csv, cfg, p, "slow co-rotating (nu1=omega_p-omega2, nu2=omega2)");
    csv.header({"g2_t", "duan_sum", "var_u", "var_v", "entangled"});
    for (const auto &w : traj)
        csv.row({format_g12(w.g2_t), format_g12(w.duan_sum), format_g12(w.var_u),
                 format_g12(w.var_v), w.entangled() ? "1" : "0"});
    csv.close();
    double dmin = traj.front().duan_sum;
    for (const auto &w : traj) dmin = std::min(dmin, w.duan_sum);
    os << "min duan_sum = " << format_g12(dmin) << "\n";
    return 0;
}

inline int cmd_diffusion(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    const SystemParams &p = rp.system;
    if (cfg.out.empty()) throw config_error("diffusion: --out is required");
    const auto rc = coefficients(p);
    const auto ass = atom_steady_state(p);
    double r1 = cfg.r1, r2 = cfg.r2;
    double eta_lock = 0;
    bool have_lock = false;
    if (r1 <= 0 || r2 <= 0) {
        const auto sm = steady_moments(rc, ass);
        if (!(sm.n1 > 0) || !(sm.n2 > 0))
            throw solver_error("diffusion: reduced steady state has no photons; "
                               "pass --r1/--r2 explicitly");
        r1 = std::sqrt(sm.n1);
        r2 = std::sqrt(sm.n2);
        eta_lock = 0.5 * std::arg(sm.c);
        have_lock = true;
    }
    CsvWriter csv(cfg.out);
    write_param_header(csv, cfg, p, "pump");
    csv.comment("r1 = " + format_g12(r1) + ", r2 = " + format_g12(r2));
    if (have_lock)
        csv.comment("operating eta (arg c / 2) = " + format_g12(eta_lock));
    for (const auto &fp : eta_fixed_points(rc, ass, r1, r2))
        csv.comment("eta fixed point: eta = " + format_g12(fp.eta) +
                    ", slope = " + format_g12(fp.slope) +
                    ", d_etaeta = " + format_g12(fp.d_etaeta) +
                    (fp.stable() ? " (stable)" : " (unstable)"));
    csv.header({"eta", "d_eta", "d_etaeta", "d_theta", "d_thetatheta", "d_thetaeta"});
    for (int i = 0; i < cfg.eta_n; ++i) {
        const double eta = tau * double(i) / double(cfg.eta_n);
        const auto dc = diffusion_coefficients(rc, ass, {r1, r2, eta, 0.0});
        csv.row({format_g12(eta), format_g12(dc.d_eta), format_g12(dc.d_etaeta),
                 format_g12(dc.d_theta), format_g12(dc.d_thetatheta),
                 format_g12(dc.d_thetaeta)});
    }
    csv.close();
    if (have_lock) {
        const auto dc = diffusion_coefficients(rc, ass, {r1, r2, eta_lock, 0.0});
        os << "d_etaeta at operating eta = " << format_g12(dc.d_etaeta) << "\n";
    }
    os << "schawlow_townes_hz (n_tot=" << format_g12(r1 * r1 + r2 * r2)
       << ") = " << format_g12(schawlow_townes(p.kappa1, p.kappa2, r1 * r1 + r2 * r2) / tau)
       << "\n";
    return 0;
}

inline int cmd_sweep(const RunConfig &cfg, std::ostream &os) {
    const auto rp = load_params(cfg);
    if (cfg.out.empty()) throw config_error("sweep: --out is required");
    if (cfg.sweep_axes.empty()) throw config_error("sweep: --field/--from/--to/--n required");
    SweepSpec spec;
    spec.axes = cfg.sweep_axes;
    spec.full_model = cfg.model == "full";
    spec.trunc = cfg.trunc;
    spec.jobs = cfg.jobs;
    std::vector<std::string> comments = {"celsim sweep"};
    for (const auto &[key, value] : params_as_hz(rp.system))
        comments.push_back(key + " = " + format_g12(value));
    comments.push_back("model = " + cfg.model);
    const size_t solved = run_sweep(rp.system, spec, cfg.out, comments);
    os << "computed " << solved << " points (" << cfg.out << ")\n";
    return 0;
}

} // namespace detail

// Executes the command; returns the process exit code.
inline int run(const RunConfig &cfg, std::ostream &os = std::cout,
               std::ostream &err = std::cerr) {
    try {
        if (cfg.command == "params") return detail::cmd_params(cfg, os);
        if (cfg.command == "steady") return detail::cmd_steady(cfg, os);
        if (cfg.command == "evolve") return detail::cmd_evolve(cfg, os);
        if (cfg.command == "transmit") return detail::cmd_transmit(cfg, os);
        if (cfg.command == "duan") return detail::cmd_duan(cfg, os);
        if (cfg.command == "diffusion") return detail::cmd_diffusion(cfg, os);
        if (cfg.command == "sweep") return detail::cmd_sweep(cfg, os);
        throw config_error("unknown command: " + cfg.command);
    } catch (const config_error &ex) {
        err << "error: " << ex.what() << "\n";
        return 2;
    } catch (const io_error &ex) {
        err << "error: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception &ex) {
        err << "error: " << ex.what() << "\n";
        return 3;
    }
}

} // namespace cel
