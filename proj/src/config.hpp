#pragma once
// Run configuration: an INI-style text file with fixed sections and keys.
#include <optional>
#include <string>
#include <vector>

#include "verify.hpp"

namespace fw {

struct TimeGrid {
    double t_min = 1, t_max = 100;
    int n = 32;
    bool log_spacing = true;
    std::vector<double> times() const;
};

struct ErgodicSettings {
    std::vector<double> t_grid{10, 30, 100, 250, 500, 1000};
    double threshold = 0.05;
    bool strict = false;
};

struct StatphaseSettings {
    double t_min = 100, t_max = 1e4;
    int n_t = 9;
    double threshold = -1.3;
};

struct TypeLSettings {
    int points = 24;
    double x_min = 1e-9, x_max = 1e-5;
};

struct RunConfig {
    std::string origin;
    std::string text;
    std::string digest;  // SHA-256 of the config text

    bool has_surface = false;
    SurfaceModel surface;
    HamiltonianModel hamiltonian;
    bool has_point = false;
    SurfacePoint point;

    IntegratorConfig integrator;
    FrontOptions front;
    TimeGrid times;
    std::optional<Mask> front_mask;

    ActionOptions actions;
    LambdaOptions lambda;
    int profile_points = 64;
    TypeLSettings typeL;

    TheoremOptions verify;
    PoleOptions pole;

    std::optional<ErgodicProblem> ergodic;
    ErgodicSettings ergodic_settings;

    std::optional<OscillatoryProblem> statphase;
    std::optional<OscillatoryProblem> statphase_degenerate;
    StatphaseSettings statphase_settings;

    std::string output_dir;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);

}  // namespace fw
