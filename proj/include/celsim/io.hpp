#pragma once

// Flat key = value parameter files ('#' comments) and CSV output.
// The file <-> memory boundary is where Hz becomes rad/s: every
// frequency-like key (frequencies, rates, couplings, slopes) is an
// ordinary frequency in Hz on disk; phases stay in rad, flux in Phi_0
// units.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "celsim/errors.hpp"
#include "celsim/model.hpp"
#include "celsim/spectroscopy.hpp"

namespace cel {

using ParamMap = std::map<std::string, double>;

inline ParamMap read_param_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open params file: " + path);
    ParamMap m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, eq, rest;
        std::istringstream ss(line);
        if (!(ss >> key)) continue; // blank
        if (!(ss >> eq) || eq != "=")
            throw config_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
        double value;
        if (!(ss >> value))
            throw config_error(path + ":" + std::to_string(lineno) + ": bad value for " + key);
        m[key] = value;
    }
    return m;
}

namespace detail {

// Hz-valued SystemParams fields, keyed exactly by field name.
inline const std::vector<std::pair<std::string, double SystemParams::*>> &
system_param_fields() {
    static const std::vector<std::pair<std::string, double SystemParams::*>> fields = {
        {"omega1", &SystemParams::omega1},     {"omega2", &SystemParams::omega2},
        {"omega_eg", &SystemParams::omega_eg}, {"omega_dg", &SystemParams::omega_dg},
        {"omega_p", &SystemParams::omega_p},   {"Omega", &SystemParams::Omega},
        {"g1", &SystemParams::g1},             {"g2", &SystemParams::g2},
        {"g3", &SystemParams::g3},             {"g4", &SystemParams::g4},
        {"g5", &SystemParams::g5},             {"kappa1", &SystemParams::kappa1},
        {"kappa2", &SystemParams::kappa2},     {"gamma21", &SystemParams::gamma21},
        {"gamma22", &SystemParams::gamma22},   {"gamma31", &SystemParams::gamma31},
        {"gamma32", &SystemParams::gamma32},   {"gamma33", &SystemParams::gamma33},
    };
    return fields;
}

} // namespace detail

// Resolves a parameter map over the given base (defaults), converting
// Hz -> rad/s. Unknown keys are an error so typos do not pass silently.
// Flux/level-model keys (gap_delta, ip_slope, phi_n_index, delta_phi and
// their dg_ twins) are consumed here as well.
struct ResolvedParams {
    SystemParams system;
    FluxLevelModel flux;
    bool has_flux = false;
};

inline ResolvedParams resolve_params(const ParamMap &file,
                                     const SystemParams &base = default_working_point()) {
    ResolvedParams r;
    r.system = base;
    FluxParams eg = default_flux_params();
    FluxParams dg = default_flux_params();
    // the d-g level model defaults to the e-g gap shifted by omega_de at
    // the working bias, i.e. the same slope with a larger gap
    dg.gap_delta = eg.gap_delta + tau * 6.5376e9;
    dg.ip_slope = derive_ip_slope(base.omega_dg, dg.gap_delta, eg.delta_phi);

    for (const auto &[key, value] : file) {
        bool known = false;
        for (const auto &[name, member] : detail::system_param_fields())
            if (key == name) {
                r.system.*member = tau * value;
                known = true;
                break;
            }
        if (known) continue;
        if (key == "phi") { r.system.phi = value; continue; }
        if (key == "gap_delta") { eg.gap_delta = tau * value; r.has_flux = true; continue; }
        if (key == "ip_slope") { eg.ip_slope = tau * value; r.has_flux = true; continue; }
        if (key == "phi_n_index") { eg.phi_n_index = static_cast<int>(value); continue; }
        if (key == "delta_phi") {
            eg.delta_phi = value; dg.delta_phi = value; r.has_flux = true; continue;
        }
        if (key == "dg_gap_delta") { dg.gap_delta = tau * value; r.has_flux = true; continue; }
        if (key == "dg_ip_slope") { dg.ip_slope = tau * value; r.has_flux = true; continue; }
        throw config_error("unknown parameter key: " + key);
    }
    r.flux = {eg, dg};
    r.system.validate();
    return r;
}

inline std::string format_g12(double v) {
    if (v == 0.0) v = 0.0; // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Pairs of (key, Hz value) for printing a resolved parameter set.
inline std::vector<std::pair<std::string, double>> params_as_hz(const SystemParams &p) {
    std::vector<std::pair<std::string, double>> rows;
    for (const auto &[name, member] : detail::system_param_fields())
        rows.emplace_back(name, (p.*member) / tau);
    rows.emplace_back("phi", p.phi); // rad, not Hz
    rows.emplace_back("omega_de", p.omega_de() / tau);
    return rows;
}

// CSV writer with '#' header comments. Two modes:
//  - atomic: write to <path>.tmp, rename on close (single-run outputs);
//  - append: open existing file and flush per row (resumable sweeps).
class CsvWriter {
public:
    enum class Mode { Atomic, Append };

    CsvWriter(std::string path, Mode mode = Mode::Atomic) : path_(std::move(path)), mode_(mode) {
        const std::string target = mode_ == Mode::Atomic ? path_ + ".tmp" : path_;
        out_.open(target, mode_ == Mode::Append ? std::ios::app : std::ios::trunc);
        if (!out_)
            throw io_error("cannot open output file: " + target);
    }
    ~CsvWriter() {
        if (!closed_) {
            // best effort; destructors must not throw
            try { close(); } catch (...) {}
        }
    }

    void comment(const std::string &text) { out_ << "# " << text << "\n"; }
    void header(const std::vector<std::string> &cols) {
        for (size_t i = 0; i < cols.size(); ++i)
            out_ << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    }
    void row(const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
        if (mode_ == Mode::Append) out_.flush();
    }

    void close() {
        closed_ = true;
        out_.flush();
        if (!out_)
            throw io_error("write failed: " + path_);
        out_.close();
        if (mode_ == Mode::Atomic) {
            std::error_code ec;
            std::filesystem::rename(path_ + ".tmp", path_, ec);
            if (ec)
                throw io_error("cannot move " + path_ + ".tmp into place: " + ec.message());
        }
    }

private:
    std::string path_;
    Mode mode_;
    std::ofstream out_;
    bool closed_ = false;
};

// Counts non-comment, non-header data rows of an existing CSV (0 when the
// file does not exist); used to resume interrupted sweeps.
inline size_t count_data_rows(const std::string &path) {
    std::ifstream in(path);
    if (!in) return 0;
    size_t rows = 0;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { header_seen = true; continue; }
        ++rows;
    }
    return rows;
}

} // namespace cel
