#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "celsim/cli.hpp"

using namespace cel;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("celsim_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string &name) const { return (path / name).string(); }
    static int &counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    out << text;
}

int quiet_run(const RunConfig &cfg, std::string *out = nullptr, std::string *err = nullptr) {
    std::ostringstream os, es;
    const int rc = run(cfg, os, es);
    if (out) *out = os.str();
    if (err) *err = es.str();
    return rc;
}

} // namespace

TEST_CASE("param files parse, override defaults, and reject typos") {
    TempDir tmp;
    write_file(tmp.file("p.txt"), "# comment\nOmega = 0  # inline comment\nkappa1 = 1e6\n");
    const auto m = read_param_file(tmp.file("p.txt"));
    CHECK(m.at("Omega") == 0.0);
    CHECK(m.at("kappa1") == 1e6);

    const auto rp = resolve_params(m);
    CHECK(rp.system.Omega == 0.0);
    CHECK(rp.system.kappa1 == Approx(tau * 1e6));
    CHECK(rp.system.omega1 == Approx(default_working_point().omega1)); // untouched default

    write_file(tmp.file("bad.txt"), "omega_one = 5\n");
    CHECK_THROWS_AS(resolve_params(read_param_file(tmp.file("bad.txt"))), config_error);
    write_file(tmp.file("bad2.txt"), "Omega 900e6\n");
    CHECK_THROWS_AS(read_param_file(tmp.file("bad2.txt")), config_error);
}

TEST_CASE("params command prints the resolved working point") {
    RunConfig cfg;
    cfg.command = "params";
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(out.find("Omega = 900000000") != std::string::npos);
    CHECK(out.find("kappa2 = 1940000") != std::string::npos);
    CHECK(out.find("ip_slope") != std::string::npos);
}

TEST_CASE("missing params file exits 2 and names the path") {
    RunConfig cfg;
    cfg.command = "steady";
    cfg.params_file = "/nonexistent/params.txt";
    std::string err;
    CHECK(quiet_run(cfg, nullptr, &err) == 2);
    CHECK(err.find("/nonexistent/params.txt") != std::string::npos);
}

TEST_CASE("steady without drive reports zero photons") {
    TempDir tmp;
    write_file(tmp.file("p.txt"), "Omega = 0\n");
    RunConfig cfg;
    cfg.command = "steady";
    cfg.params_file = tmp.file("p.txt");
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(out.find("n1 = 0\n") != std::string::npos);
    CHECK(out.find("n2 = 0\n") != std::string::npos);
}

TEST_CASE("unstable parameter point exits 3") {
    TempDir tmp;
    write_file(tmp.file("p.txt"), "g1 = 720e6\ng2 = 624e6\n"); // far above threshold
    RunConfig cfg;
    cfg.command = "steady";
    cfg.params_file = tmp.file("p.txt");
    std::string err;
    CHECK(quiet_run(cfg, nullptr, &err) == 3);
    CHECK(err.find("abscissa") != std::string::npos);
}

TEST_CASE("unwritable output path exits 4") {
    RunConfig cfg;
    cfg.command = "duan";
    cfg.out = "/nonexistent_dir/x.csv";
    cfg.points = 10;
    cfg.t_max = 1e-8;
    CHECK(quiet_run(cfg) == 4);
}

TEST_CASE("unknown command exits 2") {
    RunConfig cfg;
    cfg.command = "frobnicate";
    CHECK(quiet_run(cfg) == 2);
}

TEST_CASE("duan command writes the documented schema and is deterministic") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "duan";
    cfg.out = tmp.file("duan_a.csv");
    cfg.points = 50;
    cfg.t_max = 5e-7;
    CHECK(quiet_run(cfg) == 0);
    cfg.out = tmp.file("duan_b.csv");
    CHECK(quiet_run(cfg) == 0);
    const std::string a = slurp(tmp.file("duan_a.csv"));
    CHECK(a == slurp(tmp.file("duan_b.csv"))); // byte-identical
    CHECK(a.find("g2_t,duan_sum,var_u,var_v,entangled") != std::string::npos);
    CHECK(a.find("# frame =") != std::string::npos);
    CHECK(a.find("# Omega = 900000000") != std::string::npos);
    CHECK(a.find(",1\n") != std::string::npos); // some entangled rows
}

TEST_CASE("diffusion command emits the eta sweep with lock metadata") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "diffusion";
    cfg.out = tmp.file("diff.csv");
    cfg.eta_n = 16;
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    const std::string csv = slurp(tmp.file("diff.csv"));
    CHECK(csv.find("eta,d_eta,d_etaeta,d_theta,d_thetatheta,d_thetaeta") != std::string::npos);
    CHECK(csv.find("eta fixed point") != std::string::npos);
    CHECK(out.find("d_etaeta at operating eta = -") != std::string::npos); // negative
    CHECK(out.find("schawlow_townes_hz") != std::string::npos);
}

TEST_CASE("reduced evolve writes the moment trajectory schema") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "evolve";
    cfg.model = "reduced";
    cfg.out = tmp.file("mom.csv");
    cfg.points = 20;
    cfg.t_max = 3e-7;
    CHECK(quiet_run(cfg) == 0);
    const std::string csv = slurp(tmp.file("mom.csv"));
    CHECK(csv.find("t,re_m1,im_m1,re_m2,im_m2,n1,n2,re_c,im_c") != std::string::npos);
    CHECK(csv.find("# frame = slow co-rotating") != std::string::npos);
}

TEST_CASE("full evolve writes the trajectory schema") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "evolve";
    cfg.model = "full";
    cfg.frame = "slow";
    cfg.trunc = Truncation{2, 2};
    cfg.out = tmp.file("traj.csv");
    cfg.points = 5;
    cfg.t_max = 2e-8;
    CHECK(quiet_run(cfg) == 0);
    const std::string csv = slurp(tmp.file("traj.csv"));
    CHECK(csv.find("t,trace,n1,n2,p_g,p_e,p_d,re_a1,im_a1,re_a2,im_a2") != std::string::npos);
    // one header + 5 data rows
    CHECK(count_data_rows(tmp.file("traj.csv")) == 5);
}

TEST_CASE("transmit gap report") {
    TempDir tmp;
    write_file(tmp.file("p.txt"), "g1 = 0\ng3 = 0\ng4 = 0\ng5 = 0\nOmega = 0\n"
                                  "omega_eg = 11.9979e9\n");
    RunConfig cfg;
    cfg.command = "transmit";
    cfg.params_file = tmp.file("p.txt");
    cfg.gap = "g2";
    cfg.trunc = Truncation{0, 3};
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(out.find("gap_hz = 156000000") != std::string::npos);
}

TEST_CASE("transmit spectrum normalizes to 1 at the peak") {
    TempDir tmp;
    write_file(tmp.file("p.txt"), "g2 = 0\ng4 = 0\ng5 = 0\nOmega = 0\n");
    RunConfig cfg;
    cfg.command = "transmit";
    cfg.params_file = tmp.file("p.txt");
    cfg.out = tmp.file("t.csv");
    cfg.trunc = Truncation{0, 4};
    cfg.wd_from_hz = 11.9979e9 - 10e6;
    cfg.wd_to_hz = 11.9979e9 + 10e6;
    cfg.wd_n = 21;
    CHECK(quiet_run(cfg) == 0);
    const std::string csv = slurp(tmp.file("t.csv"));
    CHECK(csv.find("delta_phi,omega_d_hz,re_t,im_t,abs_t_norm") != std::string::npos);
    CHECK(csv.find(",1\n") != std::string::npos); // peak row normalized to 1
    CHECK(count_data_rows(tmp.file("t.csv")) == 21);
}

TEST_CASE("sweep endpoints, resumability and error column") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.out = tmp.file("sweep.csv");
    cfg.sweep_axes = {{"Omega", 0.0, 900e6, 2}};
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(out.find("computed 2 points") != std::string::npos);

    // n1 column: 0 at Omega = 0, ~5 at the working drive
    std::ifstream in(tmp.file("sweep.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    REQUIRE(rows.size() == 3); // header + 2 rows
    CHECK(rows[1].find("0,0,0,nan,") == 0);
    CHECK(rows[2].find("900000000,4.9945") == 0);

    // a completed sweep re-runs without solver calls
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(out.find("computed 0 points") != std::string::npos);
    CHECK(count_data_rows(tmp.file("sweep.csv")) == 2);

    // per-point failures land in the error column and do not abort
    RunConfig bad;
    bad.command = "sweep";
    bad.out = tmp.file("sweep_err.csv");
    bad.sweep_axes = {{"omega_dg", 18.0355e9, 10e9, 3}}; // last points break level order
    CHECK(quiet_run(bad, &out) == 0);
    const std::string csv = slurp(tmp.file("sweep_err.csv"));
    CHECK(csv.find("omega_dg") != std::string::npos);
    CHECK(count_data_rows(tmp.file("sweep_err.csv")) == 3);
    // the good row still carries numbers
    CHECK(csv.find("18035500000,4.9945") != std::string::npos);
}

TEST_CASE("2D sweep emits the frequency-sum column in grid order") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.out = tmp.file("sweep2d.csv");
    cfg.jobs = 2;
    cfg.sweep_axes = {{"omega_p", 18.0045e9, 18.0065e9, 3}, {"Omega", 600e6, 900e6, 2}};
    std::string out;
    CHECK(quiet_run(cfg, &out) == 0);
    CHECK(count_data_rows(tmp.file("sweep2d.csv")) == 6);
    std::ifstream in(tmp.file("sweep2d.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    CHECK(rows[0].find("freq_sum_residual_hz") != std::string::npos);
    // rows ordered by (omega_p, Omega) grid index
    CHECK(rows[1].find("18004500000,600000000,") == 0);
    CHECK(rows[2].find("18004500000,900000000,") == 0);
    CHECK(rows[3].find("18005500000,600000000,") == 0);
}

TEST_CASE("interrupted sweep resumes at the first missing row") {
    TempDir tmp;
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.out = tmp.file("resume.csv");
    cfg.sweep_axes = {{"Omega", 300e6, 900e6, 4}};
    CHECK(quiet_run(cfg) == 0);
    // drop the last row to fake an interrupt
    std::ifstream in(tmp.file("resume.csv"));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    std::ofstream out(tmp.file("resume.csv"), std::ios::trunc);
    for (size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << "\n";
    out.close();
    std::string msg;
    CHECK(quiet_run(cfg, &msg) == 0);
    CHECK(msg.find("computed 1 points") != std::string::npos);
    CHECK(count_data_rows(tmp.file("resume.csv")) == 4);
}
