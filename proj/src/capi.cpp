#include "frontwave/frontwave.h"

#include <new>
#include <string>
#include <vector>

#include "commands.hpp"
#include "error.hpp"
#include "lambda.hpp"
#include "parallel.hpp"

struct fw_config {
    fw::RunConfig cfg;
};

struct fw_result {
    fw::CommandResult res;
    std::string report;
};

namespace {

thread_local std::string g_last_error;

template <class F>
fw_status guarded(F&& body)
{
    try {
        g_last_error.clear();
        body();
        return FW_OK;
    } catch (const fw::Error& e) {
        g_last_error = e.what();
        return static_cast<fw_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return FW_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FW_ERR_INTERNAL;
    }
}

fw_status invalid(const char* what)
{
    g_last_error = what;
    return FW_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* fw_version(void) { return fw::kVersion; }

const char* fw_status_name(fw_status status)
{
    switch (status) {
    case FW_OK: return "Ok";
    case FW_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case FW_ERR_INTERNAL: return "Internal";
    default:
        if (status >= FW_ERR_CONFIG && status <= FW_ERR_IO) return fw::error_name(static_cast<fw::ErrorCode>(status));
        return "Unknown";
    }
}

const char* fw_last_error(void) { return g_last_error.c_str(); }

fw_status fw_set_threads(int threads)
{
    if (threads < 0) return invalid("thread count must be nonnegative");
    return guarded([&] { fw::set_threads(threads == 0 ? fw::default_threads() : threads); });
}

int fw_threads(void) { return fw::threads(); }

fw_status fw_config_load(const char* path, fw_config** out)
{
    if (!path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new fw_config{fw::load_config(path)}; });
}

fw_status fw_config_parse(const char* text, fw_config** out)
{
    if (!text || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new fw_config{fw::parse_config(text)}; });
}

const char* fw_config_digest(const fw_config* cfg) { return cfg ? cfg->cfg.digest.c_str() : ""; }

void fw_config_free(fw_config* cfg) { delete cfg; }

fw_status fw_run(const fw_config* cfg, const char* command, const char* out_dir, double horizon, fw_result** out)
{
    if (!cfg || !command || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        fw::RunOptions opt;
        if (out_dir) opt.out_dir = out_dir;
        if (horizon > 0) opt.horizon = horizon;
        auto* r = new fw_result{fw::run_command(command, cfg->cfg, opt), {}};
        r->report = r->res.report.dump(2);
        *out = r;
    });
}

int fw_result_passed(const fw_result* res) { return res && res->res.status == fw::RunStatus::Pass ? 1 : 0; }
const char* fw_result_summary(const fw_result* res) { return res ? res->res.summary.c_str() : ""; }
const char* fw_result_report_json(const fw_result* res) { return res ? res->report.c_str() : ""; }
const char* fw_result_out_dir(const fw_result* res) { return res ? res->res.out_dir.c_str() : ""; }
size_t fw_result_file_count(const fw_result* res) { return res ? res->res.files.size() : 0; }
const char* fw_result_file(const fw_result* res, size_t index)
{
    return res && index < res->res.files.size() ? res->res.files[index].c_str() : nullptr;
}
void fw_result_free(fw_result* res) { delete res; }

fw_status fw_lambda(const fw_config* cfg, double* lambda, double* error_estimate)
{
    if (!cfg || !lambda) return invalid("null argument");
    return guarded([&] {
        const auto& c = cfg->cfg;
        if (!c.has_surface || !c.has_point) throw fw::Error(fw::ErrorCode::Config, "lambda needs [surface], [hamiltonian] and [point]");
        fw::ActionModel model(c.hamiltonian, c.surface, c.actions);
        const auto rep = fw::compute_lambda(model, c.point, c.lambda);
        *lambda = rep.lambda;
        if (error_estimate) *error_estimate = rep.error_estimate;
    });
}

fw_status fw_front_lengths(const fw_config* cfg, const double* times, size_t count, double* lengths)
{
    if (!cfg || (count && (!times || !lengths))) return invalid("null argument");
    return guarded([&] {
        const auto& c = cfg->cfg;
        if (!c.has_surface || !c.has_point) throw fw::Error(fw::ErrorCode::Config, "front needs [surface], [hamiltonian] and [point]");
        const auto rows = fw::length_series(c.hamiltonian, c.surface, c.point, std::vector<double>(times, times + count), c.front);
        for (size_t i = 0; i < count; ++i) lengths[i] = rows[i].length;
    });
}

}  // extern "C"
