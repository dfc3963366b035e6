#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chdl/io.hpp"

// End-to-end tests of the command-line binary: every invocation goes through
// std::system against the installed executable (CHDL_CLI_PATH).

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "chdl_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd =
        std::string(CHDL_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_json(const std::string& name, const json& j) {
    const fs::path p = work_dir() / name;
    std::ofstream f(p);
    f << j.dump(2);
    return p;
}

fs::path write_mat(const std::string& name, const chdl::Mat& m) {
    return write_json(name, chdl::mat_to_json(m));
}

fs::path write_channel(const std::string& name, const chdl::Channel& ch) {
    return write_json(name, chdl::channel_to_json(ch));
}

// Shared fixtures.
struct Fixtures {
    fs::path I2, H, A, id_channel, z_channel;
    Fixtures() {
        using chdl::Mat;
        I2 = write_mat("I2.json", Mat::Identity(2, 2));
        Mat h = Mat::Zero(2, 2);
        h(1, 1) = 1.0;
        H = write_mat("H.json", h);
        Mat a = Mat::Zero(2, 2);
        a(1, 1) = 1.0;
        A = write_mat("A.json", a);
        id_channel = write_channel("id.json", chdl::Channel::identity(2));
        Mat Z = Mat::Identity(2, 2);
        Z(1, 1) = -1.0;
        z_channel = write_channel("z.json", chdl::Channel::unitary(Z));
    }
};

const Fixtures& fx() {
    static Fixtures f;
    return f;
}

}  // namespace

TEST_CASE("enorm: identity operator has E-norm 1, closed-form diag case") {
    CliResult r = run_cli("enorm " + fx().I2.string() + " " + fx().H.string() + " 0.5");
    REQUIRE(r.exit_code == 0);
    json d = json::parse(r.out);
    CHECK(d.at("value").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.at("provenance").at("version").get<std::string>() == "chdl 1.0.0");

    // A = diag(0,1), H = diag(0,1), E = 0.25: ||A||_E^2 = E.
    CliResult r2 = run_cli("enorm " + fx().A.string() + " " + fx().H.string() + " 0.25");
    REQUIRE(r2.exit_code == 0);
    CHECK(json::parse(r2.out).at("value").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("enorm --sweep: squared values nondecreasing in E") {
    CliResult r =
        run_cli("enorm " + fx().A.string() + " " + fx().H.string() + " 0.8 --sweep 10");
    REQUIRE(r.exit_code == 0);
    json sweep = json::parse(r.out).at("sweep");
    REQUIRE(sweep.size() == 10);
    double prev = -1;
    for (const auto& row : sweep) {
        const double v = row.at("value_sq").get<double>();
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
}

TEST_CASE("bures: identical channels give distance zero") {
    CliResult r = run_cli("bures " + fx().id_channel.string() + " " + fx().id_channel.string() +
                          " " + fx().H.string() + " 0.5");
    REQUIRE(r.exit_code == 0);
    json d = json::parse(r.out);
    CHECK(d.at("value").get<double>() < 1e-6);
    CHECK(d.at("fw_gap").get<double>() < 1e-6);
}

TEST_CASE("diamond: identity vs Z without constraint reaches the unitary bound") {
    CliResult r = run_cli("diamond " + fx().id_channel.string() + " " + fx().z_channel.string());
    REQUIRE(r.exit_code == 0);
    json d = json::parse(r.out);
    CHECK(d.at("lower").get<double>() >= 2.0 - 1e-3);
    CHECK(d.at("lower").get<double>() <= d.at("upper").get<double>() + 1e-9);
}

TEST_CASE("dilate: common dilation of identity vs Z achieves beta = 2 sqrt(E)") {
    CliResult r = run_cli("dilate " + fx().id_channel.string() + " " + fx().z_channel.string() +
                          " " + fx().H.string() + " 0.25");
    REQUIRE(r.exit_code == 0);
    json d = json::parse(r.out);
    CHECK(d.at("beta").get<double>() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(d.at("residual").get<double>() < 1e-7);
    CHECK(d.at("isometry_residual_phi").get<double>() < 1e-9);
    CHECK(d.at("isometry_residual_psi").get<double>() < 1e-9);
    CHECK(d.at("reconstruction_phi").get<double>() < 1e-7);
    CHECK(d.at("reconstruction_psi").get<double>() < 1e-7);
}

TEST_CASE("counterexample: dual column locks at 1 while forward gaps on tau_1 vanish") {
    const fs::path out = work_dir() / "cex.json";
    CliResult r = run_cli("counterexample 16 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    json d = json::parse(slurp(out));
    bool saw_dual = false, saw_forward = false;
    for (const auto& row : d.at("rows")) {
        const int n = row.at("n").get<int>();
        const std::string metric = row.at("metric").get<std::string>();
        const double v = row.at("value").get<double>();
        if (metric == "dual_gap" && n >= 2) {
            CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
            saw_dual = true;
        }
        if (metric == "forward_gap" && row.at("probe_id") == "tau_1" && n >= 2) {
            CHECK(v < 1e-12);
            saw_forward = true;
        }
    }
    CHECK(saw_dual);
    CHECK(saw_forward);
    // The CSV companion exists and has the canonical header.
    const std::string csv = slurp(out.string() + ".csv");
    CHECK(csv.rfind("n,probe_id,metric,value\n", 0) == 0);
}

TEST_CASE("converge: rotation family forward gaps decay geometrically") {
    CliResult r = run_cli("converge rotation --n-max 12");
    REQUIRE(r.exit_code == 0);
    std::vector<double> maxima;
    json d = json::parse(r.out);
    for (const auto& row : d.at("rows"))
        if (row.at("probe_id") == "max") maxima.push_back(row.at("value").get<double>());
    REQUIRE(maxima.size() == 12);
    for (size_t i = 2; i < maxima.size(); ++i) CHECK(maxima[i] < 0.75 * maxima[i - 1]);
}

TEST_CASE("validate: well-formed channel passes with the right Choi rank") {
    CliResult r = run_cli("validate " + fx().id_channel.string());
    REQUIRE(r.exit_code == 0);
    json d = json::parse(r.out);
    CHECK(d.at("pass").get<bool>());
    CHECK(d.at("choi_rank").get<int>() == 1);
}

TEST_CASE("determinism: repeated runs are byte-identical") {
    for (const std::string args :
         {"enorm " + fx().A.string() + " " + fx().H.string() + " 0.25",
          "bures " + fx().id_channel.string() + " " + fx().z_channel.string() + " " +
              fx().H.string() + " 0.25",
          std::string("counterexample 8")}) {
        CliResult a = run_cli(args);
        CliResult b = run_cli(args);
        REQUIRE(a.exit_code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("exit codes: 2 for parse/input errors, 3 for infeasible energy bounds") {
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("enorm " + (work_dir() / "missing.json").string() + " " + fx().H.string() +
                  " 0.5")
              .exit_code == 2);
    // E = -0.5 is below the ground energy of H.
    CliResult r = run_cli("enorm " + fx().I2.string() + " " + fx().H.string() + " -0.5");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("energy bound") != std::string::npos);
}
