#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "error.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace fw {

namespace {

constexpr double kPi = std::numbers::pi;

double poly_eval(const std::vector<double>& c, double x, int order = 0)
{
    double acc = 0;
    for (int i = (int)c.size() - 1; i >= order; --i) {
        double f = 1;
        for (int j = 0; j < order; ++j) f *= i - j;
        acc = acc * x + f * c[i];
    }
    return acc;
}

double poly_integral(const std::vector<double>& c, double a, double b)
{
    double acc = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        acc += c[i] * (std::pow(b, (double)i + 1) - std::pow(a, (double)i + 1)) / (i + 1.0);
    return acc;
}

// least-squares slope of log y against log x, skipping nonpositive y
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<SeriesRow> restrict_series(const std::vector<SeriesRow>& all, const std::vector<double>& times)
{
    std::vector<SeriesRow> out;
    for (double t : times)
        for (const auto& r : all)
            if (r.t == t) {
                out.push_back(r);
                break;
            }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- growth rate

SlopeReport verify_theorem(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                           const TheoremOptions& opt)
{
    if (surface.is_sphere() && surface.near_pole(A.s))
        throw Error(ErrorCode::Precondition, "source point is a pole; use the periodic pole check");
    SlopeReport rep;
    std::optional<ActionModel> model;
    try {
        model.emplace(H, surface, opt.actions);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MorseViolation) throw Error(ErrorCode::AssumptionFailure, std::string("A1: ") + e.what());
        throw;
    }
    if (!model->flat()) rep.critical = model->critical_points();
    rep.a2 = check_A2(*model, opt.a2);
    if (!rep.a2.ok) {
        const auto& f = rep.a2.failures.front();
        throw Error(ErrorCode::AssumptionFailure, "A2: frequency curve has no independent derivatives on chart " +
                                                      std::to_string(f.chart) + " near sigma=" + std::to_string(f.sigma));
    }
    rep.fiber = check_A3_A4(*model, A);
    if (!rep.fiber.a3 || !rep.fiber.a4)
        throw Error(ErrorCode::AssumptionFailure, std::string(rep.fiber.a3 ? "A4: " : "A3: ") + rep.fiber.detail);
    rep.lambda = compute_lambda(*model, A, opt.lambda);
    rep.predicted = rep.lambda.lambda;
    rep.lambda_error = rep.lambda.error_estimate;

    std::vector<double> horizons{opt.horizon};
    horizons.insert(horizons.end(), opt.extra_horizons.begin(), opt.extra_horizons.end());
    std::vector<std::vector<double>> grids;
    std::vector<double> times;
    for (double h : horizons) {
        grids.push_back(log_spaced_times(opt.t_min, h, opt.n_times));
        times.insert(times.end(), grids.back().begin(), grids.back().end());
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<Mask> masks;
    if (opt.mask) {
        Mask out = *opt.mask;
        out.complement = !out.complement;
        masks = {*opt.mask, out};
    }
    rep.series = length_series(H, surface, A, times, opt.front, masks);

    for (std::size_t i = 0; i < horizons.size(); ++i) {
        HorizonResult hr;
        hr.horizon = horizons[i];
        hr.slope = slope_estimate(restrict_series(rep.series, grids[i]), opt.tail_fraction);
        hr.gap = std::fabs(hr.slope.slope - rep.predicted) / rep.predicted;
        rep.horizons.push_back(hr);
    }
    rep.measured = rep.horizons.front().slope;
    rep.relative_gap = rep.horizons.front().gap;
    rep.pass = rep.relative_gap <= opt.gap_tol;

    if (opt.mask) {
        rep.masked = true;
        auto main = restrict_series(rep.series, grids.front());
        auto pick = [&](int k) {
            auto rows = main;
            for (auto& r : rows) r.length = r.masked[k];
            return slope_estimate(rows, opt.tail_fraction);
        };
        rep.inside = pick(0);
        rep.outside = pick(1);
        rep.additivity_gap = std::fabs(rep.inside.slope + rep.outside.slope - rep.measured.slope) / rep.measured.slope;
    }
    return rep;
}

PoleReport verify_periodic_pole(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                                const PoleOptions& opt)
{
    if (!surface.is_sphere()) throw Error(ErrorCode::Precondition, "periodic pole check needs a sphere of revolution");
    if (!surface.near_pole(A.s)) throw Error(ErrorCode::Precondition, "source point is not a pole");
    if (opt.samples < 5) throw Error(ErrorCode::Precondition, "too few time samples");
    PoleReport rep;
    // travel time from pole to pole and back along a meridian
    if (H.kind == HamiltonianKind::Geodesic) {
        rep.period = 2 * surface.L / std::sqrt(2 * H.E);
    } else {
        auto inv_speed = [&](double s) { return 1 / std::sqrt(2 * (H.E - H.potential(s))); };
        rep.period = 2 * integrate(inv_speed, 0.0, surface.L, 1e-13, 1e-12);
    }
    const int n = opt.samples % 2 ? opt.samples : opt.samples + 1;
    const int half = (n - 1) / 2;
    std::vector<double> times;
    for (int i = 1; i < n; ++i) times.push_back(2 * rep.period * i / (n - 1));
    rep.series = length_series(H, surface, A, times, opt.front);
    // prepend t = 0 where the front is the point A
    SeriesRow zero;
    rep.series.insert(rep.series.begin(), zero);
    CompensatedSum mean;
    for (int i = 0; i <= half; ++i) mean.add(rep.series[i].length);
    rep.mean_length = mean.value() / (half + 1);
    for (int i = 0; i <= half; ++i)
        rep.max_deviation = std::max(rep.max_deviation, std::fabs(rep.series[i].length - rep.series[i + half].length));
    rep.max_deviation /= rep.mean_length;
    rep.pass = rep.max_deviation <= opt.threshold;
    return rep;
}

// ---------------------------------------------------------------- stationary phase

double OscillatoryProblem::phase(double x, int order) const
{
    double v = poly_eval(phase_poly, x, order);
    if (!phase_cos.empty() || !phase_sin.empty()) {
        TrigPoly tp(phase_cos, phase_sin, 1.0);
        std::vector<double> d(order + 1);
        tp.derivatives(x, order, d.data());
        v += d[order];
    }
    return v;
}

double OscillatoryProblem::amplitude(double x) const
{
    const double u = (x - center) / radius;
    if (std::fabs(u) >= 1) return 0;
    return poly_eval(amp_poly, x) * std::exp(1 - 1 / (1 - u * u));
}

std::vector<CriticalPhasePoint> phase_critical_points(const OscillatoryProblem& p)
{
    if (!(p.radius > 0)) throw Error(ErrorCode::Precondition, "amplitude radius must be positive");
    const int M = 20000;
    const double a = p.center - p.radius, h = 2 * p.radius / M;
    std::vector<double> x(M + 1), g(M + 1);
    double gmax = 0;
    for (int i = 0; i <= M; ++i) {
        x[i] = a + h * i;
        g[i] = p.phase(x[i], 1);
        gmax = std::max(gmax, std::fabs(g[i]));
    }
    const double zero_tol = 1e-12 * (gmax + 1);
    std::vector<double> roots;
    auto S1 = [&](double z) { return p.phase(z, 1); };
    auto S2 = [&](double z) { return p.phase(z, 2); };
    boost::math::tools::eps_tolerance<double> tol(52);
    for (int i = 0; i < M; ++i) {
        if (g[i] == 0) {
            roots.push_back(x[i]);
        } else if (g[i] * g[i + 1] < 0) {
            std::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve(S1, x[i], x[i + 1], g[i], g[i + 1], tol, it);
            roots.push_back(0.5 * (r.first + r.second));
        } else if (i > 0 && std::fabs(g[i]) <= std::fabs(g[i - 1]) && std::fabs(g[i]) <= std::fabs(g[i + 1]) &&
                   g[i - 1] * g[i + 1] > 0) {
            // touching zero without a sign change: minimum of |S'| at a root of S''
            const double l = x[i - 1], r = x[i + 1];
            if (S2(l) * S2(r) < 0) {
                std::uintmax_t it = 100;
                auto m = boost::math::tools::toms748_solve(S2, l, r, tol, it);
                const double z = 0.5 * (m.first + m.second);
                if (std::fabs(S1(z)) <= zero_tol) roots.push_back(z);
            }
        }
    }
    if (g[M] == 0) roots.push_back(x[M]);
    std::sort(roots.begin(), roots.end());
    std::vector<CriticalPhasePoint> out;
    for (double r : roots) {
        if (!out.empty() && std::fabs(r - out.back().x) < 1e-9 * p.radius) continue;
        out.push_back({r, p.phase(r), p.phase(r, 2)});
    }
    return out;
}

std::complex<double> statphase_leading(const OscillatoryProblem& p, double t)
{
    if (!(t > 0)) throw Error(ErrorCode::Precondition, "t must be positive");
    const auto crit = phase_critical_points(p);
    double s2max = 0;
    for (int i = 0; i <= 256; ++i) s2max = std::max(s2max, std::fabs(p.phase(p.center + p.radius * (i / 128.0 - 1), 2)));
    std::complex<double> acc = 0;
    for (const auto& c : crit) {
        const double amp = p.amplitude(c.x);
        if (std::fabs(c.S2) <= 1e-8 * std::max(1.0, s2max)) {
            if (amp == 0) continue;
            throw Error(ErrorCode::DegenerateCritical, "S'' vanishes at the critical point x=" + std::to_string(c.x));
        }
        const double eps = c.S2 > 0 ? 1 : -1;
        acc += std::sqrt(2 * kPi / (t * std::fabs(c.S2))) * std::polar(1.0, eps * kPi / 4 + t * c.S) * amp;
    }
    return acc;
}

std::complex<double> statphase_direct(const OscillatoryProblem& p, double t, double tol)
{
    if (t == 0) throw Error(ErrorCode::Precondition, "t must be nonzero");
    double gmax = 0;
    for (int i = 0; i <= 4096; ++i) gmax = std::max(gmax, std::fabs(p.phase(p.center + p.radius * (i / 2048.0 - 1), 1)));
    const double a = p.center - p.radius, len = 2 * p.radius;
    long n = std::max<long>(64, (long)std::ceil(std::fabs(t) * gmax * len / (2 * kPi)));
    auto rule = [&](long panels) {
        const double h = len / panels;
        std::vector<std::complex<double>> part(panels);
        parallel_for(panels, [&](std::size_t i) {
            part[i] = gauss_legendre20(
                [&](double x) { return std::polar(p.amplitude(x), t * p.phase(x)); }, a + h * i, a + h * (i + 1));
        });
        CompensatedSum re, im;
        for (const auto& v : part) {
            re.add(v.real());
            im.add(v.imag());
        }
        return std::complex<double>(re.value(), im.value());
    };
    std::complex<double> prev = rule(n);
    for (;;) {
        n *= 2;
        if (n > (1L << 22)) throw Error(ErrorCode::BudgetExceeded, "oscillatory quadrature needs too many panels at t=" + std::to_string(t));
        const std::complex<double> cur = rule(n);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
}

DecayReport statphase_decay_rate(const OscillatoryProblem& p, const std::vector<double>& t_grid, double slope_threshold)
{
    DecayReport rep;
    try {
        statphase_leading(p, t_grid.empty() ? 1.0 : t_grid.front());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateCritical) throw;
        rep.degenerate = true;
    }
    std::vector<double> xs, ys;
    for (double t : t_grid) {
        StatphaseRow r;
        r.t = t;
        r.direct = statphase_direct(p, t);
        if (!rep.degenerate) r.leading = statphase_leading(p, t);
        r.gap = rep.degenerate ? std::abs(r.direct) : std::abs(r.direct - r.leading);
        xs.push_back(t);
        ys.push_back(r.gap);
        rep.rows.push_back(r);
    }
    rep.slope = loglog_slope(xs, ys);
    rep.pass = rep.degenerate ? rep.slope < 0 : rep.slope <= slope_threshold;
    return rep;
}

// ---------------------------------------------------------------- equidistribution

double ErgodicProblem::F(double s, double theta1, double theta2) const
{
    double acc = 0;
    for (const auto& m : modes) {
        const double arg = 2 * kPi * (m.k1 * theta1 + m.k2 * theta2);
        acc += poly_eval(m.c, s) * std::cos(arg) + poly_eval(m.d, s) * std::sin(arg);
    }
    return acc;
}

double ErgodicProblem::psi(double s) const
{
    double acc = 0;
    for (const auto& m : modes) acc += std::fabs(poly_eval(m.c, s)) + std::fabs(poly_eval(m.d, s));
    return acc;
}

double ergodic_lhs(const ErgodicProblem& p, double t, double tol)
{
    if (!(p.s1 > p.s0)) throw Error(ErrorCode::Precondition, "empty interval");
    double vmax = 0;
    for (int i = 0; i <= 1024; ++i) {
        const double s = p.s0 + (p.s1 - p.s0) * i / 1024.0;
        vmax = std::max({vmax, std::fabs(p.v1.derivative(s, 1)), std::fabs(p.v2.derivative(s, 1))});
    }
    int kmax = 0;
    for (const auto& m : p.modes) kmax = std::max(kmax, std::abs(m.k1) + std::abs(m.k2));
    const double len = p.s1 - p.s0;
    long n = std::max<long>(32, (long)std::ceil(std::fabs(t) * kmax * vmax * len));
    auto integrand = [&](double s) { return p.F(s, t * p.v1(s), t * p.v2(s)); };
    auto rule = [&](long panels) {
        const double h = len / panels;
        std::vector<double> part(panels);
        parallel_for(panels, [&](std::size_t i) { part[i] = gauss_legendre20(integrand, p.s0 + h * i, p.s0 + h * (i + 1)); });
        CompensatedSum sum;
        for (double v : part) sum.add(v);
        return sum.value();
    };
    double prev = rule(n);
    for (;;) {
        n *= 2;
        if (n > (1L << 22)) throw Error(ErrorCode::BudgetExceeded, "ergodic quadrature needs too many panels at t=" + std::to_string(t));
        const double cur = rule(n);
        if (std::fabs(cur - prev) <= tol) return cur;
        prev = cur;
    }
}

double ergodic_rhs(const ErgodicProblem& p)
{
    double acc = 0;
    for (const auto& m : p.modes)
        if (m.k1 == 0 && m.k2 == 0) acc += poly_integral(m.c, p.s0, p.s1);
    return acc;
}

double ergodic_max_abs(const ErgodicProblem& p, int grid)
{
    double m = 0;
    for (int i = 0; i <= grid; ++i) {
        const double s = p.s0 + (p.s1 - p.s0) * i / grid;
        for (int j = 0; j < grid; ++j)
            for (int k = 0; k < grid; ++k) m = std::max(m, std::fabs(p.F(s, double(j) / grid, double(k) / grid)));
    }
    return m;
}

bool ergodic_hypothesis(const ErgodicProblem& p, std::string* detail)
{
    const int max_order = 4;
    for (int i = 0; i <= 32; ++i) {
        const double s = p.s0 + (p.s1 - p.s0) * i / 32.0;
        std::vector<std::array<double, 2>> d;
        for (int k = 1; k <= max_order; ++k) d.push_back({p.v1.derivative(s, k), p.v2.derivative(s, k)});
        bool found = false;
        for (int k = 0; k < max_order && !found; ++k)
            for (int l = k + 1; l < max_order && !found; ++l) {
                const double nk = std::hypot(d[k][0], d[k][1]), nl = std::hypot(d[l][0], d[l][1]);
                if (nk == 0 || nl == 0) continue;
                found = std::fabs(d[k][0] * d[l][1] - d[k][1] * d[l][0]) > 1e-6 * nk * nl;
            }
        if (!found) {
            if (detail) *detail = "no two independent derivatives of V up to order 4 at s=" + std::to_string(s);
            return false;
        }
    }
    if (detail) *detail = "independent derivatives found at all 33 samples";
    return true;
}

ErgodicReport ergodic_convergence(const ErgodicProblem& p, const std::vector<double>& t_grid, double threshold, bool strict)
{
    ErgodicReport rep;
    rep.hypothesis = ergodic_hypothesis(p, &rep.hypothesis_detail);
    if (!rep.hypothesis && strict) throw Error(ErrorCode::HypothesisFailure, rep.hypothesis_detail);
    rep.rhs = ergodic_rhs(p);
    rep.max_F = ergodic_max_abs(p);
    rep.psi_integral = integrate([&](double s) { return p.psi(s); }, p.s0, p.s1, 1e-12, 1e-10);
    std::vector<double> ts(t_grid), errs;
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
        ErgodicRow r;
        r.t = t;
        r.lhs = ergodic_lhs(p, t);
        r.error = std::fabs(r.lhs - rep.rhs);
        errs.push_back(r.error);
        rep.rows.push_back(r);
    }
    const double scale = rep.max_F * (p.s1 - p.s0);
    bool tiny = true;
    for (double e : errs) tiny &= e <= 1e-12 * std::max(scale, 1e-300);
    rep.trend = tiny ? 0 : loglog_slope(ts, errs);
    bool small = rep.rows.size() >= 3;
    for (std::size_t i = rep.rows.size() >= 3 ? rep.rows.size() - 3 : 0; i < rep.rows.size(); ++i)
        small &= rep.rows[i].error <= threshold * scale;
    rep.pass = rep.hypothesis && small && (tiny || rep.trend < 0);
    return rep;
}

}  // namespace fw
