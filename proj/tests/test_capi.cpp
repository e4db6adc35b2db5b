// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include <frontwave/frontwave.h>

#include "doctest.h"

namespace {
const char* kFlat = "[surface]\nkind = flat_torus\n[hamiltonian]\nkind = geodesic\nE = 0.5\n[point]\ntheta = 0\ns = 0\n"
                    "[front]\nt_min = 1\nt_max = 10\nn_times = 8\n";
}

TEST_CASE("version and status names")
{
    CHECK(std::string(fw_version()) == "1.0.0");
    CHECK(std::string(fw_status_name(FW_ERR_CONFIG)) == "ConfigError");
    CHECK(std::string(fw_status_name(FW_OK)) == "Ok");
}

TEST_CASE("parse errors come back as codes with a message")
{
    fw_config* cfg = nullptr;
    CHECK(fw_config_parse("[surface]\nkind = cube\n[hamiltonian]\nkind = geodesic\n", &cfg) == FW_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::strstr(fw_last_error(), "surface.kind") != nullptr);
    CHECK(fw_config_parse(nullptr, &cfg) == FW_ERR_INVALID_ARGUMENT);
    CHECK(fw_config_load("/nonexistent/x.cfg", &cfg) == FW_ERR_IO);
}

TEST_CASE("lambda and front lengths without files")
{
    fw_config* cfg = nullptr;
    REQUIRE(fw_config_parse(kFlat, &cfg) == FW_OK);
    CHECK(std::strlen(fw_config_digest(cfg)) == 64);
    double lambda = 0, err = 0;
    REQUIRE(fw_lambda(cfg, &lambda, &err) == FW_OK);
    CHECK(lambda == doctest::Approx(2 * std::numbers::pi).epsilon(1e-9));
    const double times[3] = {1, 2, 5};
    double lengths[3] = {};
    REQUIRE(fw_front_lengths(cfg, times, 3, lengths) == FW_OK);
    for (int i = 0; i < 3; ++i) CHECK(lengths[i] == doctest::Approx(2 * std::numbers::pi * times[i]).epsilon(1e-9));
    fw_config_free(cfg);
}

TEST_CASE("run a command and read the result")
{
    fw_config* cfg = nullptr;
    REQUIRE(fw_config_parse(kFlat, &cfg) == FW_OK);
    fw_result* res = nullptr;
    CHECK(fw_run(cfg, "nope", "/tmp/frontwave_capi", 0, &res) != FW_OK);
    REQUIRE(fw_run(cfg, "simulate", "/tmp/frontwave_capi", 0, &res) == FW_OK);
    CHECK(fw_result_passed(res) == 1);
    CHECK(std::string(fw_result_out_dir(res)) == "/tmp/frontwave_capi");
    CHECK(fw_result_file_count(res) >= 3);
    CHECK(fw_result_file(res, 1000) == nullptr);
    CHECK(std::strstr(fw_result_report_json(res), "\"slope\"") != nullptr);
    fw_result_free(res);
    REQUIRE(fw_set_threads(1) == FW_OK);
    CHECK(fw_threads() == 1);
    CHECK(fw_set_threads(-1) == FW_ERR_INVALID_ARGUMENT);
    fw_config_free(cfg);
}
