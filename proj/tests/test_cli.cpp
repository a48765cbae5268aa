#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "modmirror/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("MODMIRROR_CLI");
    REQUIRE_MESSAGE(p != nullptr, "MODMIRROR_CLI must point at the built binary");
    return p;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("modmirror_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter() {
        static int n = 0;
        return n++;
    }
};

int run(const std::string& args, const fs::path& cwd, bool raw = false) {
    const std::string invocation = raw ? args : "'" + cli_path() + "' " + args;
    const std::string cmd = "cd '" + cwd.string() + "' && " + invocation +
                            " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_two_qubit_config(const fs::path& p) {
    std::ofstream out(p);
    out << R"({
  "qubits": [
    {"f0_mhz": 6129.0, "gamma1_mhz": 4.4, "gamma2_mhz": 4.1, "am_mhz": 30.0, "alpha_over_pi": 0.0},
    {"f0_mhz": 6129.0, "gamma1_mhz": 4.4, "gamma2_mhz": 4.1, "am_mhz": 30.0, "alpha_over_pi": 1.0}
  ],
  "phi_over_pi": 0.5,
  "drive": {"f_mhz": 6129.0, "rabi_mhz": 0.044, "port": "left"},
  "modulation": {"omega_mhz": 20.0}
})";
}

} // namespace

TEST_CASE("sidebands subcommand writes the CSV and manifest") {
    TempDir dir;
    write_two_qubit_config(dir.path / "pair.json");
    REQUIRE(run("sidebands --config pair.json --nmax auto", dir.path) == 0);
    const std::string csv = slurp(dir.path / "sidebands.csv");
    CHECK(csv.rfind("n,re_r,im_r,re_t,im_t\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);
    const auto manifest = json::parse(slurp(dir.path / "sidebands.manifest.json"));
    CHECK(manifest["subcommand"] == "sidebands");
    CHECK(manifest["outputs"][0] == "sidebands.csv");
    // the resolved scene in the manifest re-validates
    CHECK_NOTHROW(modmirror::config::scene_from_json(manifest["scene"]));
}

TEST_CASE("single-qubit sweep produces the Lorentzian dip data") {
    TempDir dir;
    REQUIRE(run("single-qubit --am-mhz 0 --sweep 6060:6200:281", dir.path) == 0);
    const std::string csv = slurp(dir.path / "single-qubit.csv");
    std::size_t rows = 0;
    double min_power = 1e300;
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "f_mhz,re_t0,im_t0,abs_t0_sq");
    while (std::getline(ss, line)) {
        ++rows;
        const auto last_comma = line.rfind(',');
        min_power = std::min(min_power, std::stod(line.substr(last_comma + 1)));
    }
    CHECK(rows == 281);
    CHECK(min_power == doctest::Approx(0.190).epsilon(0.02));
}

TEST_CASE("map runs are byte-identical across worker counts and reruns") {
    TempDir dir;
    write_two_qubit_config(dir.path / "pair.json");
    const std::string args =
        "map --config pair.json --alpha-steps 7 --detuning-steps 9 --sideband -1";
    REQUIRE(run(args + " --workers 1 --out map_w1", dir.path) == 0);
    REQUIRE(run(args + " --workers 4 --out map_w4", dir.path) == 0);
    const std::string a = slurp(dir.path / "map_w1_n-1.csv");
    const std::string b = slurp(dir.path / "map_w4_n-1.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);

    // replaying the argv recorded in the manifest reproduces the bytes
    const auto manifest = json::parse(slurp(dir.path / "map_w1.manifest.json"));
    std::string replay;
    for (const auto& arg : manifest["argv"])
        replay += std::string(arg) + " ";
    REQUIRE(run(replay, dir.path) == 0);
    CHECK(slurp(dir.path / "map_w1_n-1.csv") == a);
    CHECK(manifest["grid_shapes"]["alpha"] == 7);
    CHECK(manifest["grid_shapes"]["detuning"] == 9);

    // the MODMIRROR_WORKERS default changes nothing either
    REQUIRE(run("env MODMIRROR_WORKERS=3 '" + cli_path() + "' " + args + " --out map_env",
                dir.path, /*raw=*/true) == 0);
    CHECK(slurp(dir.path / "map_env_n-1.csv") == a);
}

TEST_CASE("validation failures exit with code 2") {
    TempDir dir;
    std::ofstream(dir.path / "bad.json") << R"({
  "qubits": [{"f0_mhz": 6129.0, "gamma1_mhz": 4.4, "gamma2_mhz": 1.0, "am_mhz": 0.0, "alpha_over_pi": 0.0}],
  "phi_over_pi": 0.5,
  "drive": {"f_mhz": 6129.0, "rabi_mhz": 0.044, "port": "left"},
  "modulation": {"omega_mhz": 20.0}
})";
    CHECK(run("sidebands --config bad.json", dir.path) == 2);
    const std::string err = slurp(dir.path / "cli_stderr.txt");
    CHECK(err.find("gamma2") != std::string::npos);
    CHECK(run("sidebands --config missing.json", dir.path) == 2);
    CHECK(run("definitely-not-a-subcommand", dir.path) == 2);
}

TEST_CASE("solver failures exit with code 3") {
    TempDir dir;
    // Without modulation the sideband transmission vanishes and the gyrator
    // phase is undefined (AmplitudeTooSmall).
    std::ofstream(dir.path / "flat.json") << R"({
  "qubits": [
    {"f0_mhz": 6129.0, "gamma1_mhz": 4.4, "gamma2_mhz": 4.1, "am_mhz": 0.0, "alpha_over_pi": 0.0},
    {"f0_mhz": 6129.0, "gamma1_mhz": 4.4, "gamma2_mhz": 4.1, "am_mhz": 0.0, "alpha_over_pi": 1.0}
  ],
  "phi_over_pi": 0.5,
  "drive": {"f_mhz": 6129.0, "rabi_mhz": 0.044, "port": "left"},
  "modulation": {"omega_mhz": 20.0}
})";
    CHECK(run("gyrator --config flat.json --sideband -1 --det-steps 3 --det-span-mhz 5",
              dir.path) == 3);
}

TEST_CASE("isolator and gyrator subcommands emit one-shot summaries") {
    TempDir dir;
    REQUIRE(run("isolator --alpha-over-pi -0.3 --sideband 1 --detuning-mhz -20", dir.path) == 0);
    const std::string csv = slurp(dir.path / "isolator.csv");
    CHECK(csv.rfind("alpha_over_pi,sideband,detuning_mhz,s21,s12,isolation_db,"
                    "insertion_loss_db\n", 0) == 0);
    REQUIRE(run("gyrator --sideband -1 --det-steps 5 --det-span-mhz 10", dir.path) == 0);
    const std::string gy = slurp(dir.path / "gyrator.csv");
    std::size_t rows = 0;
    std::istringstream ss(gy);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line))
        ++rows;
    CHECK(rows == 5);
}

TEST_CASE("fit subcommand round-trips a synthetic linear calibration") {
    TempDir dir;
    {
        std::ofstream f(dir.path / "cal.csv");
        f << "av_vpp,am_mhz\n";
        for (double v : {0.01, 0.02, 0.04, 0.08})
            f << v << "," << 400.0 * v << "\n";
    }
    REQUIRE(run("fit --mode linear --input cal.csv", dir.path) == 0);
    const auto result = json::parse(slurp(dir.path / "fit.json"));
    CHECK(double(result["slope_mhz_per_vpp"]) == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(std::abs(double(result["intercept_mhz"])) < 1e-9);
}
