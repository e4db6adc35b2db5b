#include "config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "error.hpp"

namespace fw {

namespace pt = boost::property_tree;

namespace {

const std::vector<std::string> kProblemKeys{"phase_poly", "phase_cos", "phase_sin", "amp_poly", "center", "radius"};

std::map<std::string, std::set<std::string>> schema()
{
    std::map<std::string, std::set<std::string>> s{
        {"surface", {"kind", "L", "a_cos", "a_sin"}},
        {"hamiltonian", {"kind", "E", "V_cos", "V_sin"}},
        {"point", {"theta", "s"}},
        {"integrator", {"rel_tol", "abs_tol", "max_step", "max_steps"}},
        {"front",
         {"n0", "tol", "checkpoint_dt", "max_samples", "windows", "window_x0", "window_panel", "window_margin", "y_cap",
          "t_min", "t_max", "n_times", "spacing", "mask"}},
        {"actions",
         {"rel_tol", "abs_tol", "lambda_rel_tol", "tail_rel", "y_direct", "end_fraction", "reparametrize",
          "profile_points", "typeL_points", "typeL_x_min", "typeL_x_max"}},
        {"verify",
         {"horizon", "n_times", "t_min", "tail_fraction", "gap_tol", "extra_horizons", "mask", "pole_samples",
          "pole_threshold"}},
        {"ergodic", {"s0", "s1", "v_freq", "v1_cos", "v1_sin", "v2_cos", "v2_sin", "t_grid", "threshold", "strict"}},
        {"statphase", {"t_min", "t_max", "n_t", "threshold"}},
        {"statphase_degenerate", {}},
        {"output", {"dir"}},
    };
    for (int i = 1; i <= 16; ++i) s["ergodic"].insert("mode" + std::to_string(i));
    for (const auto& k : kProblemKeys) {
        s["statphase"].insert(k);
        s["statphase_degenerate"].insert(k);
    }
    return s;
}

// "sec.key" (or "sec" for a header) -> 1-based line of its first occurrence
std::map<std::string, int> key_lines(const std::string& text)
{
    std::map<std::string, int> out;
    std::istringstream in(text);
    std::string line, sec;
    for (int n = 1; std::getline(in, line); ++n) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
        if (line[b] == '[') {
            const auto e = line.find(']', b);
            sec = line.substr(b + 1, e == std::string::npos ? std::string::npos : e - b - 1);
            out.emplace(sec, n);
            continue;
        }
        const auto eq = line.find('=', b);
        if (eq == std::string::npos) continue;
        auto key = line.substr(b, eq - b);
        key.erase(key.find_last_not_of(" \t") + 1);
        out.emplace(sec + "." + key, n);
    }
    return out;
}

std::string where(const std::string& origin, const std::map<std::string, int>& lines, const std::string& sec,
                  const std::string& key)
{
    auto it = lines.find(key.empty() ? sec : sec + "." + key);
    if (it == lines.end()) it = lines.find(sec);
    return it == lines.end() ? origin : origin + ":" + std::to_string(it->second);
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::string origin, std::map<std::string, int> lines)
        : tree_(tree), origin_(std::move(origin)), lines_(std::move(lines)) {}

    bool has_section(const std::string& sec) const { return tree_.find(sec) != tree_.not_found(); }
    bool has(const std::string& sec, const std::string& key) const
    {
        auto it = tree_.find(sec);
        return it != tree_.not_found() && it->second.find(key) != it->second.not_found();
    }
    std::string raw(const std::string& sec, const std::string& key) const
    {
        if (!has(sec, key)) fail(sec, key, "missing required key");
        return trim(tree_.get_child(pt::ptree::path_type(sec + "\x1f" + key, '\x1f')).data());
    }
    double number(const std::string& sec, const std::string& key) const { return parse_number(raw(sec, key), sec, key); }
    double number(const std::string& sec, const std::string& key, double def) const
    {
        return has(sec, key) ? number(sec, key) : def;
    }
    int integer(const std::string& sec, const std::string& key, int def) const
    {
        if (!has(sec, key)) return def;
        const double v = number(sec, key);
        if (v != std::floor(v) || std::fabs(v) > 2e9) fail(sec, key, "expected an integer");
        return (int)v;
    }
    bool boolean(const std::string& sec, const std::string& key, bool def) const
    {
        if (!has(sec, key)) return def;
        const std::string v = raw(sec, key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        fail(sec, key, "expected a boolean, got '" + v + "'");
    }
    std::vector<double> list(const std::string& sec, const std::string& key) const
    {
        if (!has(sec, key)) return {};
        return parse_list(raw(sec, key), sec, key);
    }
    std::vector<double> parse_list(const std::string& text, const std::string& sec, const std::string& key) const
    {
        std::vector<double> out;
        std::string tok;
        std::istringstream in(text);
        while (in >> tok) {
            std::string piece;
            std::istringstream parts(tok);
            while (std::getline(parts, piece, ','))
                if (!piece.empty()) out.push_back(parse_number(piece, sec, key));
        }
        return out;
    }
    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const
    {
        throw Error(ErrorCode::Config, where(origin_, lines_, sec, key) + ": " + sec + (key.empty() ? "" : "." + key) + ": " + msg);
    }

    // decimal number, optionally with a factor of pi: "1.5", "pi", "-pi/2", "0.5*pi", "2pi"
    double parse_number(std::string s, const std::string& sec, const std::string& key) const
    {
        s = trim(s);
        double factor = 1;
        const auto p = s.find("pi");
        if (p != std::string::npos) {
            std::string head = s.substr(0, p), tail = s.substr(p + 2);
            if (!head.empty() && head.back() == '*') head.pop_back();
            double mult = 1;
            if (head == "-")
                mult = -1;
            else if (!head.empty() && head != "+")
                mult = plain(head, sec, key);
            double div = 1;
            if (!tail.empty()) {
                if (tail[0] != '/') fail(sec, key, "cannot parse number '" + s + "'");
                div = plain(tail.substr(1), sec, key);
            }
            factor = std::numbers::pi * mult / div;
            return factor;
        }
        return plain(s, sec, key);
    }

private:
    static std::string trim(const std::string& s)
    {
        const auto a = s.find_first_not_of(" \t\r\n\"");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n\"");
        return s.substr(a, b - a + 1);
    }
    double plain(const std::string& s, const std::string& sec, const std::string& key) const
    {
        double v = 0;
        const char* b = s.data();
        const char* e = s.data() + s.size();
        if (b != e && *b == '+') ++b;
        auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) fail(sec, key, "cannot parse number '" + s + "'");
        return v;
    }

    const pt::ptree& tree_;
    std::string origin_;
    std::map<std::string, int> lines_;
};

std::optional<Mask> read_mask(const Reader& r, const std::string& sec)
{
    if (!r.has(sec, "mask")) return std::nullopt;
    const auto v = r.list(sec, "mask");
    if (v.size() != 4 || !(v[1] > v[0]) || !(v[3] > v[2])) r.fail(sec, "mask", "expected theta_lo, theta_hi, s_lo, s_hi");
    Mask m;
    m.theta_lo = v[0];
    m.theta_hi = v[1];
    m.s_lo = v[2];
    m.s_hi = v[3];
    return m;
}

OscillatoryProblem read_problem(const Reader& r, const std::string& sec)
{
    OscillatoryProblem p;
    p.phase_poly = r.list(sec, "phase_poly");
    p.phase_cos = r.list(sec, "phase_cos");
    p.phase_sin = r.list(sec, "phase_sin");
    if (r.has(sec, "amp_poly")) p.amp_poly = r.list(sec, "amp_poly");
    p.center = r.number(sec, "center", 0.0);
    p.radius = r.number(sec, "radius", 1.0);
    if (!(p.radius > 0)) r.fail(sec, "radius", "must be positive");
    if (p.phase_poly.empty() && p.phase_cos.empty() && p.phase_sin.empty()) r.fail(sec, "phase_poly", "phase is empty");
    return p;
}

}  // namespace

std::vector<double> TimeGrid::times() const
{
    if (log_spacing) return log_spaced_times(t_min, t_max, n);
    if (!(t_max > t_min) || !(t_min > 0) || n < 2) throw Error(ErrorCode::Config, "bad time grid");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = t_min + (t_max - t_min) * i / (n - 1);
    out.back() = t_max;
    return out;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw Error(ErrorCode::Io, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    pt::ptree tree;
    {
        std::istringstream in(text);
        try {
            pt::read_ini(in, tree);
        } catch (const pt::ini_parser_error& e) {
            throw Error(ErrorCode::Config, origin + ":" + std::to_string(e.line()) + ": " + e.message());
        }
    }
    const auto lines = key_lines(text);
    const auto sch = schema();
    for (const auto& [sec, body] : tree) {
        auto it = sch.find(sec);
        if (body.empty() && !body.data().empty())
            throw Error(ErrorCode::Config, origin + ": key '" + sec + "' outside any section");
        if (it == sch.end()) throw Error(ErrorCode::Config, where(origin, lines, sec, "") + ": unknown section [" + sec + "]");
        for (const auto& kv : body)
            if (!it->second.count(kv.first))
                throw Error(ErrorCode::Config, where(origin, lines, sec, kv.first) + ": unknown key " + sec + "." + kv.first);
    }
    Reader r(tree, origin, lines);
    RunConfig cfg;
    cfg.origin = origin;
    cfg.text = text;
    cfg.digest = sha256_hex(text);

    if (r.has_section("surface") || r.has_section("hamiltonian")) {
        const std::string kind = r.raw("surface", "kind");
        if (kind == "flat_torus") {
            cfg.surface = SurfaceModel::flat_torus();
            if (r.has("surface", "L") || r.has("surface", "a_cos") || r.has("surface", "a_sin"))
                r.fail("surface", "a_cos", "the flat torus takes no profile");
        } else if (kind == "revolution_torus") {
            cfg.surface = SurfaceModel::revolution_torus(r.number("surface", "L"), r.list("surface", "a_cos"),
                                                         r.list("surface", "a_sin"));
        } else if (kind == "revolution_sphere") {
            if (r.has("surface", "a_cos")) r.fail("surface", "a_cos", "sphere profiles are sine series");
            cfg.surface = SurfaceModel::revolution_sphere(r.number("surface", "L"), r.list("surface", "a_sin"));
        } else {
            r.fail("surface", "kind", "expected revolution_torus, revolution_sphere or flat_torus, got '" + kind + "'");
        }
        const std::string hk = r.raw("hamiltonian", "kind");
        const double E = r.number("hamiltonian", "E");
        if (hk == "geodesic") {
            if (r.has("hamiltonian", "V_cos") || r.has("hamiltonian", "V_sin"))
                r.fail("hamiltonian", "V_cos", "geodesic Hamiltonians take no potential");
            cfg.hamiltonian = HamiltonianModel::geodesic(E);
        } else if (hk == "schrodinger") {
            cfg.hamiltonian =
                HamiltonianModel::schrodinger(E, cfg.surface, r.list("hamiltonian", "V_cos"), r.list("hamiltonian", "V_sin"));
        } else {
            r.fail("hamiltonian", "kind", "expected geodesic or schrodinger, got '" + hk + "'");
        }
        try {
            cfg.surface.validate();
            cfg.hamiltonian.validate(cfg.surface);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, origin + ": " + e.what());
        }
        cfg.has_surface = true;
    }
    if (r.has_section("point")) {
        cfg.point = {r.number("point", "theta"), r.number("point", "s")};
        cfg.has_point = true;
    }

    cfg.integrator.rel_tol = r.number("integrator", "rel_tol", cfg.integrator.rel_tol);
    cfg.integrator.abs_tol = r.number("integrator", "abs_tol", cfg.integrator.abs_tol);
    cfg.integrator.max_step = r.number("integrator", "max_step", cfg.integrator.max_step);
    cfg.integrator.max_steps = (long)r.number("integrator", "max_steps", (double)cfg.integrator.max_steps);
    if (!(cfg.integrator.rel_tol > 0) || !(cfg.integrator.abs_tol > 0) || !(cfg.integrator.max_step > 0))
        r.fail("integrator", "rel_tol", "tolerances and max_step must be positive");

    FrontOptions& f = cfg.front;
    f.integ = cfg.integrator;
    f.n0 = r.integer("front", "n0", f.n0);
    if (f.n0 < 16) r.fail("front", "n0", "must be at least 16");
    f.tol = r.number("front", "tol", f.tol);
    f.checkpoint_dt = r.number("front", "checkpoint_dt", f.checkpoint_dt);
    f.max_samples = (long)r.number("front", "max_samples", (double)f.max_samples);
    f.windows = r.boolean("front", "windows", f.windows);
    f.window_x0 = r.number("front", "window_x0", f.window_x0);
    f.window_panel = r.number("front", "window_panel", f.window_panel);
    f.window_margin = r.number("front", "window_margin", f.window_margin);
    f.y_cap = r.number("front", "y_cap", f.y_cap);
    if (!(f.tol > 0) || !(f.checkpoint_dt > 0)) r.fail("front", "tol", "tol and checkpoint_dt must be positive");
    cfg.times.t_min = r.number("front", "t_min", cfg.times.t_min);
    cfg.times.t_max = r.number("front", "t_max", cfg.times.t_max);
    cfg.times.n = r.integer("front", "n_times", cfg.times.n);
    if (r.has("front", "spacing")) {
        const std::string sp = r.raw("front", "spacing");
        if (sp != "log" && sp != "linear") r.fail("front", "spacing", "expected log or linear");
        cfg.times.log_spacing = sp == "log";
    }
    cfg.front_mask = read_mask(r, "front");

    cfg.actions.rel_tol = r.number("actions", "rel_tol", cfg.actions.rel_tol);
    cfg.actions.abs_tol = r.number("actions", "abs_tol", cfg.actions.abs_tol);
    cfg.lambda.rel_tol = r.number("actions", "lambda_rel_tol", cfg.lambda.rel_tol);
    cfg.lambda.tail_rel = r.number("actions", "tail_rel", cfg.lambda.tail_rel);
    cfg.lambda.y_direct = r.number("actions", "y_direct", cfg.lambda.y_direct);
    cfg.lambda.end_fraction = r.number("actions", "end_fraction", cfg.lambda.end_fraction);
    cfg.lambda.reparametrize = r.boolean("actions", "reparametrize", cfg.lambda.reparametrize);
    cfg.profile_points = r.integer("actions", "profile_points", cfg.profile_points);
    cfg.typeL.points = r.integer("actions", "typeL_points", cfg.typeL.points);
    cfg.typeL.x_min = r.number("actions", "typeL_x_min", cfg.typeL.x_min);
    cfg.typeL.x_max = r.number("actions", "typeL_x_max", cfg.typeL.x_max);

    TheoremOptions& v = cfg.verify;
    v.horizon = r.number("verify", "horizon", v.horizon);
    v.n_times = r.integer("verify", "n_times", v.n_times);
    v.t_min = r.number("verify", "t_min", v.t_min);
    v.tail_fraction = r.number("verify", "tail_fraction", v.tail_fraction);
    v.gap_tol = r.number("verify", "gap_tol", v.gap_tol);
    v.extra_horizons = r.list("verify", "extra_horizons");
    v.mask = read_mask(r, "verify");
    v.front = cfg.front;
    v.lambda = cfg.lambda;
    v.actions = cfg.actions;
    cfg.pole.samples = r.integer("verify", "pole_samples", cfg.pole.samples);
    cfg.pole.threshold = r.number("verify", "pole_threshold", cfg.pole.threshold);
    cfg.pole.front = cfg.front;

    if (r.has_section("ergodic")) {
        ErgodicProblem e;
        e.s0 = r.number("ergodic", "s0", 0.0);
        e.s1 = r.number("ergodic", "s1", 1.0);
        if (!(e.s1 > e.s0)) r.fail("ergodic", "s1", "interval is empty");
        const double w = r.number("ergodic", "v_freq", 1.0);
        if (r.has("ergodic", "v1_cos") || r.has("ergodic", "v1_sin") || r.has("ergodic", "v2_cos") || r.has("ergodic", "v2_sin")) {
            e.v1 = TrigPoly(r.list("ergodic", "v1_cos"), r.list("ergodic", "v1_sin"), w);
            e.v2 = TrigPoly(r.list("ergodic", "v2_cos"), r.list("ergodic", "v2_sin"), w);
        }
        for (int i = 1; i <= 16; ++i) {
            const std::string key = "mode" + std::to_string(i);
            if (!r.has("ergodic", key)) continue;
            // "k1 k2 | c coefficients | d coefficients"
            const std::string text = r.raw("ergodic", key);
            std::vector<std::string> parts;
            std::string piece;
            std::istringstream in(text);
            while (std::getline(in, piece, '|')) parts.push_back(piece);
            if (parts.empty() || parts.size() > 3) r.fail("ergodic", key, "expected 'k1 k2 | c... | d...'");
            const auto k = r.parse_list(parts[0], "ergodic", key);
            if (k.size() != 2 || k[0] != std::floor(k[0]) || k[1] != std::floor(k[1]))
                r.fail("ergodic", key, "mode needs two integer wave numbers");
            FourierMode m;
            m.k1 = (int)k[0];
            m.k2 = (int)k[1];
            if (parts.size() > 1) m.c = r.parse_list(parts[1], "ergodic", key);
            if (parts.size() > 2) m.d = r.parse_list(parts[2], "ergodic", key);
            e.modes.push_back(m);
        }
        if (e.modes.empty()) r.fail("ergodic", "mode1", "at least one Fourier mode is required");
        cfg.ergodic = e;
        if (r.has("ergodic", "t_grid")) cfg.ergodic_settings.t_grid = r.list("ergodic", "t_grid");
        cfg.ergodic_settings.threshold = r.number("ergodic", "threshold", cfg.ergodic_settings.threshold);
        cfg.ergodic_settings.strict = r.boolean("ergodic", "strict", cfg.ergodic_settings.strict);
    }
    if (r.has_section("statphase")) {
        cfg.statphase = read_problem(r, "statphase");
        auto& s = cfg.statphase_settings;
        s.t_min = r.number("statphase", "t_min", s.t_min);
        s.t_max = r.number("statphase", "t_max", s.t_max);
        s.n_t = r.integer("statphase", "n_t", s.n_t);
        s.threshold = r.number("statphase", "threshold", s.threshold);
    }
    if (r.has_section("statphase_degenerate")) cfg.statphase_degenerate = read_problem(r, "statphase_degenerate");
    if (r.has("output", "dir")) cfg.output_dir = r.raw("output", "dir");
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace fw
