#pragma once

// Generic 1D/2D sweeps over SystemParams fields with the reduced-model
// steady state evaluated at each grid point. Rows are ordered by grid
// index, partial results are flushed so interrupted sweeps resume by
// skipping completed rows, and per-point solver failures land in an
// error column instead of aborting the sweep.

#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "celsim/errors.hpp"
#include "celsim/io.hpp"
#include "celsim/lindblad.hpp"
#include "celsim/model.hpp"
#include "celsim/reduced.hpp"
#include "celsim/spectroscopy.hpp"

namespace cel {

struct SweepAxis {
    std::string field;  // SystemParams field name (file units: Hz, or rad for phi)
    double from = 0;
    double to = 0;
    int n = 1;

    double at(int i) const {
        return n <= 1 ? from : from + (to - from) * double(i) / double(n - 1);
    }
};

struct SweepSpec {
    std::vector<SweepAxis> axes; // 1 or 2
    bool full_model = false;     // full Lindblad steady state instead of reduced
    Truncation trunc;            // used when full_model
    int jobs = 1;
};

namespace detail {

inline double SystemParams::*sweep_field(const std::string &name) {
    for (const auto &[fname, member] : system_param_fields())
        if (fname == name) return member;
    if (name == "phi") return &SystemParams::phi;
    throw config_error("sweep: unknown field name: " + name);
}

inline void apply_axis(SystemParams &p, const SweepAxis &ax, int i) {
    const double v = ax.at(i);
    p.*(sweep_field(ax.field)) = (ax.field == "phi") ? v : tau * v;
}

} // namespace detail

struct SweepRow {
    std::vector<double> coords; // axis values, file units
    double n1 = NAN, n2 = NAN, ratio = NAN;
    double imbalance = NAN;
    double freq_sum_residual_hz = NAN; // (omega1 + omega2) - omega_p
    std::string error;
};

inline SweepRow sweep_point(const SystemParams &base, const SweepSpec &spec,
                            const std::vector<int> &idx) {
    SweepRow row;
    SystemParams p = base;
    for (size_t a = 0; a < spec.axes.size(); ++a) {
        detail::apply_axis(p, spec.axes[a], idx[a]);
        row.coords.push_back(spec.axes[a].at(idx[a]));
    }
    try {
        p.validate();
        double n1, n2;
        if (spec.full_model) {
            const auto h = build_hamiltonian(p, FrameSpec::slow(p), spec.trunc);
            const auto rho = steady_state(liouvillian(h.static_part,
                                                      collapse_operators(p, spec.trunc)));
            n1 = expectation(rho, number_op(1, spec.trunc)).real();
            n2 = expectation(rho, number_op(2, spec.trunc)).real();
        } else {
            std::tie(n1, n2) = steady_photon_numbers(p);
        }
        row.n1 = n1;
        row.n2 = n2;
        row.ratio = n2 != 0 ? n1 / n2 : NAN;
        row.imbalance = energy_balance(n1, n2, p.kappa1, p.kappa2).imbalance;
        row.freq_sum_residual_hz = frequency_sum_residual(p.omega1, p.omega2, p.omega_p) / tau;
    } catch (const std::exception &ex) {
        row.error = ex.what();
    }
    return row;
}

// Runs the sweep, appending to `out_path`. Returns the number of solver
// calls performed (0 when the file already holds every row).
inline size_t run_sweep(const SystemParams &base, const SweepSpec &spec,
                        const std::string &out_path,
                        const std::vector<std::string> &header_comments = {}) {
    if (spec.axes.empty() || spec.axes.size() > 2)
        throw config_error("sweep: need one or two axes");
    for (const auto &ax : spec.axes) {
        if (ax.n < 1) throw config_error("sweep: grid must be nonempty");
        detail::sweep_field(ax.field); // validates the name
    }
    const int n_outer = spec.axes[0].n;
    const int n_inner = spec.axes.size() == 2 ? spec.axes[1].n : 1;
    const size_t total = static_cast<size_t>(n_outer) * n_inner;

    const size_t done = count_data_rows(out_path);
    if (done >= total) return 0;

    std::vector<std::string> cols;
    for (const auto &ax : spec.axes) cols.push_back(ax.field);
    for (const char *c : {"n1", "n2", "ratio", "imbalance", "freq_sum_residual_hz", "error"})
        cols.push_back(c);

    // header lands via an atomic rename; rows then append with per-row
    // flush so an interrupted sweep resumes at the first missing row
    if (done == 0) {
        CsvWriter head(out_path, CsvWriter::Mode::Atomic);
        for (const auto &c : header_comments) head.comment(c);
        head.header(cols);
        head.close();
    }
    CsvWriter app(out_path, CsvWriter::Mode::Append);

    auto emit = [&](const SweepRow &row) {
        std::vector<std::string> cells;
        for (double c : row.coords) cells.push_back(format_g12(c));
        for (double v : {row.n1, row.n2, row.ratio, row.imbalance, row.freq_sum_residual_hz})
            cells.push_back(std::isnan(v) ? "nan" : format_g12(v));
        std::string err = row.error;
        for (char &ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        cells.push_back(err);
        app.row(cells);
    };

    size_t solved = 0;
    if (spec.jobs <= 1) {
        for (size_t k = done; k < total; ++k) {
            const std::vector<int> idx = {static_cast<int>(k / n_inner),
                                          static_cast<int>(k % n_inner)};
            emit(sweep_point(base, spec,
                             spec.axes.size() == 2 ? idx : std::vector<int>{idx[0]}));
            ++solved;
        }
    } else {
        // workers fill a result buffer; rows are committed strictly in order
        std::vector<SweepRow> results(total - done);
        std::vector<std::atomic<bool>> ready(total - done);
        for (auto &r : ready) r.store(false);
        std::atomic<size_t> next{done};
        auto work = [&]() {
            while (true) {
                const size_t k = next.fetch_add(1);
                if (k >= total) break;
                const std::vector<int> idx = {static_cast<int>(k / n_inner),
                                              static_cast<int>(k % n_inner)};
                results[k - done] = sweep_point(
                    base, spec, spec.axes.size() == 2 ? idx : std::vector<int>{idx[0]});
                ready[k - done].store(true, std::memory_order_release);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < spec.jobs; ++w) pool.emplace_back(work);
        for (size_t k = done; k < total; ++k) {
            while (!ready[k - done].load(std::memory_order_acquire))
                std::this_thread::yield();
            emit(results[k - done]);
            ++solved;
        }
        for (auto &th : pool) th.join();
    }
    app.close();
    return solved;
}

} // namespace cel
