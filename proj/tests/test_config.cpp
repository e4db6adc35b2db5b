#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "error.hpp"

using namespace fw;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {
const char* kFlat = R"([surface]
kind = flat_torus

[hamiltonian]
kind = geodesic
E = 0.5

[point]
theta = 0.3
s = 0.2

[front]
t_min = 1
t_max = 20
n_times = 12
)";

std::string config_error(const std::string& text)
{
    try {
        parse_config(text, "test.cfg");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("frontwave_test_" + name);
    fs::remove_all(p);
    return p;
}
}  // namespace

TEST_CASE("sha256 of known strings")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config parsing: values, pi forms and defaults")
{
    const auto cfg = parse_config(R"([surface]
kind = revolution_torus
L = 2pi
a_cos = 2, 1

[hamiltonian]
kind = geodesic
E = 0.5

[point]
theta = -pi
s = pi/2

[front]
mask = 0, pi, 0, 0.5*pi
)");
    CHECK(cfg.has_surface);
    CHECK(cfg.surface.L == doctest::Approx(2 * kPi));
    CHECK(cfg.point.theta == doctest::Approx(-kPi));
    CHECK(cfg.point.s == doctest::Approx(kPi / 2));
    REQUIRE(cfg.front_mask);
    CHECK(cfg.front_mask->s_hi == doctest::Approx(kPi / 2));
    CHECK(cfg.times.n == 32);
    CHECK(cfg.digest.size() == 64);
}

TEST_CASE("config schema errors name the key and line")
{
    const std::string missing = config_error("[surface]\nL = 1\n\n[hamiltonian]\nkind = geodesic\nE = 0.5\n");
    CHECK(missing.find("surface.kind") != std::string::npos);
    CHECK(missing.find("missing") != std::string::npos);
    const std::string unknown = config_error(std::string(kFlat) + "colour = blue\n");
    CHECK(unknown.find("front.colour") != std::string::npos);
    CHECK(unknown.find("test.cfg:16") != std::string::npos);
    CHECK(config_error("[nonsense]\nx = 1\n").find("[nonsense]") != std::string::npos);
    const std::string bad = config_error("[surface]\nkind = flat_torus\n[hamiltonian]\nkind = geodesic\nE = 0,5x\n");
    CHECK(bad.find("hamiltonian.E") != std::string::npos);
    CHECK(bad.find("test.cfg:5") != std::string::npos);
}

TEST_CASE("simulate writes a checksummed, reproducible series")
{
    const auto cfg = parse_config(kFlat, "flat.cfg");
    const auto dir = scratch("simulate");
    RunOptions opt;
    opt.out_dir = dir.string();
    const auto res = run_command("simulate", cfg, opt);
    CHECK(res.status == RunStatus::Pass);
    std::ifstream csv(dir / "series.csv");
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream ss(line);
        double t, len;
        char comma;
        ss >> t >> comma >> len;
        CHECK(std::fabs(len - 2 * kPi * t) <= 1e-6 * 2 * kPi * t);
        ++rows;
    }
    CHECK(rows == 12);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    int checked = 0;
    for (const auto& f : manifest["outputs"]) {
        CHECK(sha256_hex(slurp(dir / f["file"].get<std::string>())) == f["sha256"].get<std::string>());
        ++checked;
    }
    CHECK(checked >= 3);
    const auto first = slurp(dir / "series.csv");
    const auto report = slurp(dir / "simulate_report.json");
    run_command("simulate", cfg, opt);
    CHECK(slurp(dir / "series.csv") == first);
    CHECK(slurp(dir / "simulate_report.json") == report);
}

TEST_CASE("lambda on a pole reports an assumption failure")
{
    const auto cfg = parse_config(R"([surface]
kind = revolution_sphere
L = pi
a_sin = 1

[hamiltonian]
kind = geodesic
E = 0.5

[point]
theta = 0
s = 0
)");
    RunOptions opt;
    opt.out_dir = scratch("pole_lambda").string();
    const auto res = run_command("lambda", cfg, opt);
    CHECK(res.status == RunStatus::Fail);
    CHECK(res.report["error"]["code"].get<std::string>() == "AssumptionFailure");
}

TEST_CASE("commands that need a surface reject configs without one")
{
    const auto cfg = parse_config("[output]\ndir = /tmp/x\n");
    CHECK_THROWS_AS(run_command("simulate", cfg), Error);
    CHECK_THROWS_AS(run_command("frobnicate", parse_config(kFlat)), Error);
}
