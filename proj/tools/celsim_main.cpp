// celsim command-line tool. See README.md for usage examples.

#include <CLI11.hpp>

#include "celsim/cli.hpp"

namespace {

void add_common(CLI::App *sub, cel::RunConfig &cfg, std::pair<int, int> &trunc) {
    sub->add_option("--params", cfg.params_file, "parameter file (key = value, Hz)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "output path");
    sub->add_option("--trunc", trunc, "Fock truncation n1_max,n2_max")
        ->delimiter(',');
    sub->add_option("--frame", cfg.frame, "rotating frame: pump | slow");
    sub->add_option("--tol", cfg.tol, "solver tolerance");
    sub->add_option("--jobs", cfg.jobs, "parallel jobs for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for randomized tooling (reproducibility)");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"two-mode correlated-emission-lasing simulator"};
    app.require_subcommand(1);

    cel::RunConfig cfg;
    std::pair<int, int> trunc{15, 10};

    auto *params = app.add_subcommand("params", "print the resolved parameter set");
    add_common(params, cfg, trunc);

    auto *steady = app.add_subcommand("steady", "steady-state photon numbers");
    add_common(steady, cfg, trunc);
    steady->add_option("--model", cfg.model, "reduced | full");
    steady->add_flag("--check-convergence", cfg.check_convergence,
                     "re-solve at trunc (+4,+4) and report the shift");

    auto *evolve = app.add_subcommand("evolve", "time evolution from vacuum");
    add_common(evolve, cfg, trunc);
    evolve->add_option("--model", cfg.model, "reduced | full");
    evolve->add_option("--tmax", cfg.t_max, "horizon, s");
    evolve->add_option("--points", cfg.points, "output grid size");

    auto *transmit = app.add_subcommand("transmit", "probe transmission spectra");
    add_common(transmit, cfg, trunc);
    transmit->add_option("--wd-from", cfg.wd_from_hz, "probe start, Hz");
    transmit->add_option("--wd-to", cfg.wd_to_hz, "probe end, Hz");
    transmit->add_option("--wd-n", cfg.wd_n, "probe grid size");
    transmit->add_option("--n-probe", cfg.n_probe, "probe photon number");
    transmit->add_option("--flux-from", cfg.flux_from, "flux sweep start, Phi_0");
    transmit->add_option("--flux-to", cfg.flux_to, "flux sweep end, Phi_0");
    transmit->add_option("--flux-n", cfg.flux_n, "flux grid size (0: no flux sweep)");
    transmit->add_option("--convention", cfg.convention,
                         "probe level shifts: derived | printed");
    transmit->add_option("--gap", cfg.gap, "report the anticrossing gap of g1..g5");

    auto *duan = app.add_subcommand("duan", "two-mode entanglement witness vs time");
    add_common(duan, cfg, trunc);
    duan->add_option("--tmax", cfg.t_max, "horizon, s");
    duan->add_option("--points", cfg.points, "output grid size");

    auto *diffusion = app.add_subcommand("diffusion", "phase drift/diffusion coefficients");
    add_common(diffusion, cfg, trunc);
    diffusion->add_option("--r1", cfg.r1, "mode-1 amplitude (default sqrt(n1_ss))");
    diffusion->add_option("--r2", cfg.r2, "mode-2 amplitude (default sqrt(n2_ss))");
    diffusion->add_option("--eta-n", cfg.eta_n, "eta grid size");

    auto *sweep = app.add_subcommand("sweep", "1D/2D parameter sweeps");
    add_common(sweep, cfg, trunc);
    sweep->add_option("--model", cfg.model, "reduced | full");
    std::string field1, field2;
    double from1 = 0, to1 = 0, from2 = 0, to2 = 0;
    int n1 = 0, n2 = 0;
    sweep->add_option("--field", field1, "swept SystemParams field (Hz, or rad for phi)");
    sweep->add_option("--from", from1, "axis 1 start");
    sweep->add_option("--to", to1, "axis 1 end");
    sweep->add_option("--n", n1, "axis 1 points");
    sweep->add_option("--field2", field2, "optional second axis field");
    sweep->add_option("--from2", from2, "axis 2 start");
    sweep->add_option("--to2", to2, "axis 2 end");
    sweep->add_option("--n2", n2, "axis 2 points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.trunc = cel::Truncation{trunc.first, trunc.second};
    for (auto *sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (cfg.command == "sweep" && !field1.empty()) {
        cfg.sweep_axes.push_back({field1, from1, to1, n1});
        if (!field2.empty()) cfg.sweep_axes.push_back({field2, from2, to2, n2});
    }
    return cel::run(cfg);
}
