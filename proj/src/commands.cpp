#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "assumptions.hpp"
#include "error.hpp"
#include "lambda.hpp"

namespace fw {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

class Writer {
public:
    explicit Writer(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void text(const std::string& name, const std::string& body)
    {
        const fs::path p = fs::path(dir_) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
        out << body;
        if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
        entries_.push_back({name, sha256_hex(body), body.size()});
    }
    void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

    struct Entry {
        std::string name, sha;
        std::size_t bytes;
    };
    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<Entry> entries_;
};

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header)
    {
        for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + header[i];
        body_ += "\n";
    }
    template <class... Cells>
    void row(const Cells&... cells)
    {
        bool first = true;
        ((body_ += (first ? "" : ",") + cell(cells), first = false), ...);
        body_ += "\n";
    }
    const std::string& str() const { return body_; }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    std::string body_;
};

json error_json(const Error& e)
{
    return json{{"code", error_name(e.code())}, {"message", e.what()}};
}

json model_json(const RunConfig& cfg)
{
    json j;
    j["surface"] = {{"kind", to_string(cfg.surface.kind)},
                    {"L", cfg.surface.L},
                    {"a_cos", cfg.surface.a.cos_coeffs()},
                    {"a_sin", cfg.surface.a.sin_coeffs()}};
    j["hamiltonian"] = {{"kind", to_string(cfg.hamiltonian.kind)}, {"E", cfg.hamiltonian.E}};
    if (cfg.hamiltonian.kind == HamiltonianKind::Schrodinger)
        j["hamiltonian"]["V"] = {{"cos", cfg.hamiltonian.V.cos_coeffs()}, {"sin", cfg.hamiltonian.V.sin_coeffs()}};
    if (cfg.has_point) j["point"] = {{"theta", cfg.point.theta}, {"s", cfg.point.s}};
    j["tolerances"] = {{"integrator_rel", cfg.integrator.rel_tol},
                       {"integrator_abs", cfg.integrator.abs_tol},
                       {"front_tol", cfg.front.tol},
                       {"lambda_rel", cfg.lambda.rel_tol}};
    return j;
}

json slope_json(const SlopeEstimate& s)
{
    return json{{"slope", s.slope}, {"intercept", s.intercept}, {"uncertainty", s.uncertainty},
                {"points", s.n_used}, {"t_from", s.t_from}, {"t_to", s.t_to}};
}

json a2_json(const A2Report& r)
{
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"chart", f.chart}, {"sigma", f.sigma}});
    return json{{"ok", r.ok}, {"samples", r.samples.size()}, {"failures", fails}};
}

json fiber_json(const FiberReport& r)
{
    return json{{"degenerate", r.degenerate}, {"A3", r.a3}, {"A4", r.a4}, {"separatrix_hits", r.z_hits},
                {"elliptic_hits", r.elliptic_hits}, {"critical_directions", r.critical}, {"detail", r.detail}};
}

json critical_json(const std::vector<CriticalPoint>& cps)
{
    json out = json::array();
    for (const auto& c : cps)
        out.push_back({{"s", c.s}, {"clairaut", c.P}, {"P2_second_derivative", c.P2_dd},
                       {"type", c.hyperbolic ? "hyperbolic" : "elliptic"}});
    return out;
}

json charts_json(const ActionModel& m)
{
    json out = json::array();
    for (const auto& c : m.charts())
        out.push_back({{"id", c.id}, {"regime", to_string(c.regime)}, {"p_sign", c.p_sign}, {"ps_sign", c.ps_sign},
                       {"lo", c.lo}, {"hi", c.hi}, {"lo_end", to_string(c.lo_tag)}, {"hi_end", to_string(c.hi_tag)}});
    return out;
}

void require_geometry(const RunConfig& cfg, const std::string& cmd, bool point = true)
{
    if (!cfg.has_surface) throw Error(ErrorCode::Config, cfg.origin + ": surface.kind: missing required key for " + cmd);
    if (point && !cfg.has_point) throw Error(ErrorCode::Config, cfg.origin + ": point.theta: missing required key for " + cmd);
}

bool pole_start(const RunConfig& cfg) { return cfg.surface.is_sphere() && cfg.surface.near_pole(cfg.point.s); }

// ---------------------------------------------------------------- commands

RunStatus cmd_simulate(const RunConfig& cfg, const RunOptions& opt, Writer& w, json& rep)
{
    require_geometry(cfg, "simulate");
    TimeGrid grid = cfg.times;
    if (opt.horizon) grid.t_max = *opt.horizon;
    const auto times = grid.times();
    std::vector<Mask> masks;
    if (cfg.front_mask) {
        Mask out = *cfg.front_mask;
        out.complement = true;
        masks = {*cfg.front_mask, out};
    }
    Front front(cfg.hamiltonian, cfg.surface, cfg.point, cfg.front);
    std::vector<SeriesRow> rows;
    std::vector<std::string> head{"t", "length", "refined_count", "max_pair_error"};
    if (!masks.empty()) {
        head.push_back("length_in_mask");
        head.push_back("length_outside_mask");
    }
    Csv csv(head);
    for (double t : times) {
        front.evolve(t);
        SeriesRow r;
        r.t = t;
        r.length = front.length();
        r.refined = front.refined();
        r.max_pair_error = front.max_panel_error();
        for (const auto& m : masks) r.masked.push_back(front.length(m));
        rows.push_back(r);
        if (masks.empty())
            csv.row(r.t, r.length, r.refined, r.max_pair_error);
        else
            csv.row(r.t, r.length, r.refined, r.max_pair_error, r.masked[0], r.masked[1]);
    }
    w.text("series.csv", csv.str());
    Csv pts({"theta", "s"});
    for (const auto& p : front.positions()) pts.row(p.theta, p.s);
    w.text("front_points.csv", pts.str());

    rep["model"] = model_json(cfg);
    rep["pole_start"] = front.pole_start();
    rep["final"] = {{"t", front.time()},
                    {"length", front.length()},
                    {"polyline_length", front.polyline_length()},
                    {"samples", front.sample_count()},
                    {"separatrix_windows", front.window_count()},
                    {"window_truncation", front.truncation_estimate()}};
    try {
        rep["slope"] = slope_json(slope_estimate(rows, cfg.verify.tail_fraction));
    } catch (const Error& e) {
        rep["slope"] = error_json(e);
    }
    rep["warnings"] = front.warnings();
    return RunStatus::Pass;
}

RunStatus cmd_lambda(const RunConfig& cfg, const RunOptions&, Writer& w, json& rep)
{
    require_geometry(cfg, "lambda");
    rep["model"] = model_json(cfg);
    ActionModel model(cfg.hamiltonian, cfg.surface, cfg.actions);
    const FiberReport fiber = check_A3_A4(model, cfg.point);
    rep["fiber"] = fiber_json(fiber);
    if (fiber.degenerate)
        throw Error(ErrorCode::AssumptionFailure, "A3: the fiber over a pole lies on a single leaf; " + fiber.detail);
    const LambdaReport lr = compute_lambda(model, cfg.point, cfg.lambda);
    rep["lambda"] = lr.lambda;
    rep["error_estimate"] = lr.error_estimate;
    rep["closure_total"] = lr.closure_total;
    json parts = json::array();
    Csv charts({"chart_id", "regime", "p_sign", "ps_sign", "lo", "hi", "lo_end", "hi_end", "contribution", "error"});
    for (const auto& c : lr.charts) {
        const LeafChart& lc = model.chart(c.chart);
        parts.push_back({{"chart", c.chart}, {"value", c.value}, {"error", c.error}});
        charts.row(c.chart, to_string(lc.regime), lc.p_sign, lc.ps_sign, lc.lo, lc.hi, to_string(lc.lo_tag),
                   to_string(lc.hi_tag), c.value, c.error);
    }
    rep["charts"] = parts;
    json tails = json::array();
    for (const auto& t : lr.tails)
        tails.push_back({{"chart", t.chart}, {"critical", t.crit}, {"side", t.eps}, {"N_A", t.N}, {"y_start", t.y_start},
                         {"value", t.value}, {"closure", t.closure}, {"estimates", t.estimates}});
    rep["tails"] = tails;
    w.text("lambda_charts.csv", charts.str());
    Csv prof({"chart_id", "sigma", "p1", "p2", "nu1", "nu2", "density", "N_A"});
    for (const auto& r : chart_profile(model, cfg.point, cfg.profile_points))
        prof.row(r.chart, r.sigma, r.p1, r.p2, r.nu1, r.nu2, r.density, r.N);
    w.text("lambda_profile.csv", prof.str());
    return RunStatus::Pass;
}

RunStatus cmd_verify(const RunConfig& cfg, const RunOptions& opt, Writer& w, json& rep)
{
    require_geometry(cfg, "verify");
    rep["model"] = model_json(cfg);
    if (pole_start(cfg)) {
        const PoleReport pr = verify_periodic_pole(cfg.hamiltonian, cfg.surface, cfg.point, cfg.pole);
        Csv csv({"t", "length", "refined_count", "max_pair_error"});
        for (const auto& r : pr.series) csv.row(r.t, r.length, r.refined, r.max_pair_error);
        w.text("pole_series.csv", csv.str());
        rep["check"] = "periodic_pole";
        rep["period"] = pr.period;
        rep["max_relative_deviation"] = pr.max_deviation;
        rep["mean_length"] = pr.mean_length;
        rep["threshold"] = cfg.pole.threshold;
        rep["pass"] = pr.pass;
        return pr.pass ? RunStatus::Pass : RunStatus::Fail;
    }
    TheoremOptions to = cfg.verify;
    if (opt.horizon) to.horizon = *opt.horizon;
    const SlopeReport sr = verify_theorem(cfg.hamiltonian, cfg.surface, cfg.point, to);
    std::vector<std::string> head{"t", "length", "refined_count", "max_pair_error"};
    if (sr.masked) {
        head.push_back("length_in_mask");
        head.push_back("length_outside_mask");
    }
    Csv csv(head);
    for (const auto& r : sr.series) {
        if (sr.masked)
            csv.row(r.t, r.length, r.refined, r.max_pair_error, r.masked[0], r.masked[1]);
        else
            csv.row(r.t, r.length, r.refined, r.max_pair_error);
    }
    w.text("verify_series.csv", csv.str());
    Csv hz({"horizon", "slope", "uncertainty", "relative_gap"});
    for (const auto& h : sr.horizons) hz.row(h.horizon, h.slope.slope, h.slope.uncertainty, h.gap);
    w.text("verify_horizons.csv", hz.str());
    rep["check"] = "growth_rate";
    rep["measured"] = slope_json(sr.measured);
    rep["predicted"] = sr.predicted;
    rep["predicted_error"] = sr.lambda_error;
    rep["relative_gap"] = sr.relative_gap;
    rep["gap_tol"] = to.gap_tol;
    json hzj = json::array();
    for (const auto& h : sr.horizons) hzj.push_back({{"horizon", h.horizon}, {"slope", h.slope.slope}, {"gap", h.gap}});
    rep["horizons"] = hzj;
    rep["assumptions"] = {{"A1", {{"ok", true}, {"critical_points", critical_json(sr.critical)}}},
                          {"A2", a2_json(sr.a2)},
                          {"A3_A4", fiber_json(sr.fiber)}};
    if (sr.masked) {
        rep["mask"] = {{"inside", slope_json(sr.inside)},
                       {"outside", slope_json(sr.outside)},
                       {"additivity_gap", sr.additivity_gap}};
    }
    rep["pass"] = sr.pass;
    return sr.pass ? RunStatus::Pass : RunStatus::Fail;
}

RunStatus cmd_ergodic(const RunConfig& cfg, const RunOptions&, Writer& w, json& rep)
{
    if (!cfg.ergodic) throw Error(ErrorCode::Config, cfg.origin + ": ergodic.mode1: missing [ergodic] section");
    const ErgodicReport er =
        ergodic_convergence(*cfg.ergodic, cfg.ergodic_settings.t_grid, cfg.ergodic_settings.threshold, cfg.ergodic_settings.strict);
    Csv csv({"t", "lhs", "rhs", "abs_error"});
    for (const auto& r : er.rows) csv.row(r.t, r.lhs, er.rhs, r.error);
    w.text("ergodic_convergence.csv", csv.str());
    rep["rhs"] = er.rhs;
    rep["max_abs_F"] = er.max_F;
    rep["dominating_integral"] = er.psi_integral;
    rep["hypothesis"] = {{"ok", er.hypothesis}, {"detail", er.hypothesis_detail}};
    rep["trend"] = er.trend;
    rep["threshold"] = cfg.ergodic_settings.threshold;
    rep["pass"] = er.pass;
    return er.pass ? RunStatus::Pass : RunStatus::Fail;
}

RunStatus cmd_statphase(const RunConfig& cfg, const RunOptions&, Writer& w, json& rep)
{
    if (!cfg.statphase) throw Error(ErrorCode::Config, cfg.origin + ": statphase.phase_poly: missing [statphase] section");
    const auto& s = cfg.statphase_settings;
    const auto grid = log_spaced_times(s.t_min, s.t_max, s.n_t);
    bool pass = true;
    auto run = [&](const OscillatoryProblem& p, const std::string& name) {
        const DecayReport dr = statphase_decay_rate(p, grid, s.threshold);
        Csv csv({"t", "direct_re", "direct_im", "leading_re", "leading_im", "measured"});
        for (const auto& r : dr.rows)
            csv.row(r.t, r.direct.real(), r.direct.imag(), r.leading.real(), r.leading.imag(), r.gap);
        w.text(name + ".csv", csv.str());
        json crit = json::array();
        for (const auto& c : phase_critical_points(p)) crit.push_back({{"x", c.x}, {"S", c.S}, {"S2", c.S2}});
        rep[name] = {{"degenerate", dr.degenerate},
                     {"measured", dr.degenerate ? "abs_direct" : "abs_direct_minus_leading"},
                     {"critical_points", crit},
                     {"loglog_slope", dr.slope},
                     {"pass", dr.pass}};
        pass = pass && dr.pass;
    };
    run(*cfg.statphase, "statphase");
    if (cfg.statphase_degenerate) run(*cfg.statphase_degenerate, "statphase_degenerate");
    rep["threshold"] = s.threshold;
    rep["pass"] = pass;
    return pass ? RunStatus::Pass : RunStatus::Fail;
}

RunStatus cmd_singular_set(const RunConfig& cfg, const RunOptions&, Writer& w, json& rep)
{
    require_geometry(cfg, "singular-set", false);
    rep["model"] = model_json(cfg);
    ActionModel model(cfg.hamiltonian, cfg.surface, cfg.actions);
    std::ostringstream txt;
    txt << "surface " << to_string(cfg.surface.kind) << " L=" << num(cfg.surface.L) << "\n";
    txt << "hamiltonian " << to_string(cfg.hamiltonian.kind) << " E=" << num(cfg.hamiltonian.E) << "\n";
    if (!model.flat()) {
        const auto& cps = model.critical_points();
        rep["critical_points"] = critical_json(cps);
        txt << "critical points: " << cps.size() << "\n";
        for (const auto& c : cps)
            txt << "  s=" << num(c.s) << " clairaut=" << num(c.P) << " " << (c.hyperbolic ? "hyperbolic" : "elliptic") << "\n";
    } else {
        rep["critical_points"] = json::array();
        txt << "critical points: 0\n";
    }
    rep["charts"] = charts_json(model);
    txt << "leaf charts: " << model.charts().size() << "\n";
    for (const auto& c : model.charts())
        txt << "  chart " << c.id << " " << to_string(c.regime) << " p_sign=" << c.p_sign << " ps_sign=" << c.ps_sign
            << " range=[" << num(c.lo) << ", " << num(c.hi) << "] ends=" << to_string(c.lo_tag) << "/" << to_string(c.hi_tag)
            << "\n";
    const A2Report a2 = check_A2(model);
    rep["A2"] = a2_json(a2);
    txt << "A2: " << (a2.ok ? "ok" : "fails") << " (" << a2.failures.size() << " of " << a2.samples.size()
        << " samples without independent derivatives)\n";
    bool pass = a2.ok;
    if (cfg.has_point) {
        const FiberReport fr = check_A3_A4(model, cfg.point);
        rep["A3_A4"] = fiber_json(fr);
        txt << "A3: " << (fr.a3 ? "ok" : "fails") << "  A4: " << (fr.a4 ? "ok" : "fails") << "\n";
        txt << "  separatrix directions: " << fr.z_hits.size() << "\n";
        txt << "  elliptic directions: " << fr.elliptic_hits.size() << "\n";
        txt << "  critical directions of omega -> sigma: " << fr.critical.size() << "\n";
        pass = pass && fr.a3 && fr.a4;
    }
    json fits = json::array();
    if (!model.flat()) {
        Csv csv({"chart_id", "critical", "side", "x", "p2"});
        for (const auto& c : model.charts()) {
            if (c.lo_tag != EndTag::Hyperbolic && c.hi_tag != EndTag::Hyperbolic) continue;
            const TypeLFit f = typeL_fit(model, c, cfg.typeL.points, cfg.typeL.x_min, cfg.typeL.x_max);
            fits.push_back({{"chart", f.chart}, {"critical", f.crit}, {"side", f.eps}, {"xlogx", f.c1}, {"x", f.c2},
                            {"constant", f.c3}, {"residual", f.residual}, {"data_range", f.data_range}});
            txt << "type-L fit chart " << f.chart << ": p2 = " << num(f.c1) << " x log x + " << num(f.c2) << " x + "
                << num(f.c3) << "  residual/range=" << num(f.residual / f.data_range) << "\n";
            for (std::size_t i = 0; i < f.x.size(); ++i) csv.row(f.chart, f.crit, f.eps, f.x[i], f.p2[i]);
        }
        w.text("typeL_data.csv", csv.str());
    }
    rep["typeL_fits"] = fits;
    w.text("singular_set.txt", txt.str());
    rep["pass"] = pass;
    return pass ? RunStatus::Pass : RunStatus::Fail;
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"simulate", "lambda", "verify", "ergodic", "statphase", "singular-set"};
    return names;
}

std::string resolve_out_dir(const std::string& command, const RunConfig& cfg, const RunOptions& opt)
{
    if (!opt.out_dir.empty()) return opt.out_dir;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    const std::string stem = cfg.origin.empty() || cfg.origin[0] == '<' ? "run" : fs::path(cfg.origin).stem().string();
    const char* root = std::getenv("FRONTWAVE_OUT");
    return (fs::path(root && *root ? root : "frontwave_out") / (stem + "-" + command)).string();
}

CommandResult run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt)
{
    using Fn = RunStatus (*)(const RunConfig&, const RunOptions&, Writer&, json&);
    Fn fn = nullptr;
    if (command == "simulate") fn = cmd_simulate;
    else if (command == "lambda") fn = cmd_lambda;
    else if (command == "verify") fn = cmd_verify;
    else if (command == "ergodic") fn = cmd_ergodic;
    else if (command == "statphase") fn = cmd_statphase;
    else if (command == "singular-set") fn = cmd_singular_set;
    else throw Error(ErrorCode::Precondition, "unknown command '" + command + "'");
    if (opt.horizon && !(*opt.horizon > 0)) throw Error(ErrorCode::Config, "--horizon must be positive");

    CommandResult res;
    res.out_dir = resolve_out_dir(command, cfg, opt);
    Writer w(res.out_dir);
    json rep;
    rep["command"] = command;
    rep["config_sha256"] = cfg.digest;
    const auto start = std::chrono::steady_clock::now();
    try {
        res.status = fn(cfg, opt, w, rep);
    } catch (const Error& e) {
        const bool reportable = e.code() == ErrorCode::AssumptionFailure || e.code() == ErrorCode::MorseViolation ||
                                e.code() == ErrorCode::HypothesisFailure || e.code() == ErrorCode::DegenerateCritical;
        if (!reportable) throw;
        rep["error"] = error_json(e);
        rep["pass"] = false;
        res.status = RunStatus::Fail;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string report_name = command == "singular-set" ? "singular_set.json" : command + "_report.json";
    w.json_file(report_name, rep);

    json manifest;
    manifest["artifact"] = "frontwave";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = {{"origin", cfg.origin}, {"sha256", cfg.digest}};
    manifest["status"] = res.status == RunStatus::Pass ? "pass" : "fail";
    if (rep.contains("assumptions")) manifest["assumptions"] = rep["assumptions"];
    if (rep.contains("error")) manifest["error"] = rep["error"];
    json outs = json::array();
    for (const auto& e : w.entries()) outs.push_back({{"file", e.name}, {"sha256", e.sha}, {"bytes", e.bytes}});
    manifest["outputs"] = outs;
    manifest["timings_file"] = "timings.json";
    for (const auto& e : w.entries()) res.files.push_back((fs::path(res.out_dir) / e.name).string());
    w.json_file("manifest.json", manifest);
    res.files.push_back((fs::path(res.out_dir) / "manifest.json").string());
    // wall-clock data lives outside the checksummed set so reruns stay byte-identical
    std::ofstream(fs::path(res.out_dir) / "timings.json") << json{{"command", command}, {"wall_seconds", seconds}}.dump(2) << "\n";

    res.report = rep;
    std::ostringstream sum;
    sum << command << ": " << (res.status == RunStatus::Pass ? "PASS" : "FAIL");
    if (rep.contains("lambda")) sum << " lambda=" << num(rep["lambda"].get<double>());
    if (rep.contains("relative_gap")) sum << " gap=" << num(rep["relative_gap"].get<double>());
    if (rep.contains("error")) sum << " (" << rep["error"]["message"].get<std::string>() << ")";
    sum << " -> " << res.out_dir;
    res.summary = sum.str();
    return res;
}

}  // namespace fw
