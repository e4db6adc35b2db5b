// Command-line front end; everything goes through the C interface.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "frontwave/frontwave.h"

namespace {

struct Args {
    std::string config;
    std::string out;
    int threads = 0;
    double horizon = 0;
};

int run(const std::string& command, const Args& a)
{
    if (fw_set_threads(a.threads) != FW_OK) {
        std::fprintf(stderr, "error: %s\n", fw_last_error());
        return 2;
    }
    fw_config* cfg = nullptr;
    fw_status st = fw_config_load(a.config.c_str(), &cfg);
    if (st != FW_OK) {
        std::fprintf(stderr, "error [%s]: %s\n", fw_status_name(st), fw_last_error());
        return 2;
    }
    fw_result* res = nullptr;
    st = fw_run(cfg, command.c_str(), a.out.empty() ? nullptr : a.out.c_str(), a.horizon, &res);
    fw_config_free(cfg);
    if (st != FW_OK) {
        std::fprintf(stderr, "error [%s]: %s\n", fw_status_name(st), fw_last_error());
        return 2;
    }
    std::printf("%s\n", fw_result_summary(res));
    const int code = fw_result_passed(res) ? 0 : 1;
    fw_result_free(res);
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"frontwave: wave-front length growth under integrable flows on surfaces"};
    app.set_version_flag("--version", std::string(fw_version()));
    app.require_subcommand(1);
    Args args;
    const char* commands[][2] = {
        {"simulate", "evolve the front and write the length series"},
        {"lambda", "predicted growth rate from action-angle data"},
        {"verify", "compare the measured slope with the prediction (or check pole periodicity)"},
        {"ergodic", "equidistribution test for a curved family of linear flows"},
        {"statphase", "stationary phase against direct oscillatory quadrature"},
        {"singular-set", "critical points, leaf charts and assumption checks"},
    };
    std::string chosen;
    for (auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", args.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--threads", args.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--horizon", args.horizon, "override the final time")->check(CLI::PositiveNumber);
        sub->callback([&chosen, name = std::string(c[0])] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, args);
}
