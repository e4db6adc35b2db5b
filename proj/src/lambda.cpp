#include "lambda.hpp"

#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace fw {

namespace {

struct Nu {
    double v1, v2;
};

template <class F>
std::array<double, 2> richardson(F&& nu, double u, double h)
{
    auto central = [&](double hh) {
        const Nu a = nu(u + hh), b = nu(u - hh);
        return std::array<double, 2>{(a.v1 - b.v1) / (2 * hh), (a.v2 - b.v2) / (2 * hh)};
    };
    const auto d1 = central(h), d2 = central(0.5 * h);
    return {(4 * d2[0] - d1[0]) / 3, (4 * d2[1] - d1[1]) / 3};
}

// one hyperbolic end of a chart, handled in the chart y = log(1/x)
class EndZone {
public:
    EndZone(const ActionModel& model, const LeafChart& c, int crit, int eps)
        : model_(model), c_(c), crit_(crit), eps_(eps) {}

    Level level(double y) const { return model_.level_near(crit_, std::exp(-y), eps_); }
    double T(double y) const { return model_.frequencies(c_, level(y)).T; }
    double density(double y) const
    {
        auto nu = [&](double yy) {
            const Frequencies f = model_.frequencies(c_, level(yy));
            return Nu{f.nu1, f.nu2};
        };
        const auto w = richardson(nu, y, 0.05);
        return model_.density(c_, level(y), w);
    }
    double dT(double y) const { return (T(y + 0.05) - T(y - 0.05)) / 0.1; }

private:
    const ActionModel& model_;
    const LeafChart& c_;
    int crit_, eps_;
};

TailReport integrate_end(const ActionModel& model, const LeafChart& c, int crit, int eps, int N, double x_start,
                         double threshold, const LambdaOptions& opt)
{
    EndZone zone(model, c, crit, eps);
    TailReport rep;
    rep.chart = c.id;
    rep.crit = crit;
    rep.eps = eps;
    rep.N = N;
    rep.y_start = std::log(1 / x_start);
    double y = rep.y_start;
    double Tk = zone.T(y);
    double value = 0;
    double M = 0, alpha = 0, v = 1 / Tk;
    int stalls = 0;
    bool analytic = false;
    for (int step = 0; step < 200; ++step) {
        double seg = 0, tail = 0;
        if (!analytic) {
            // next point where the period doubles, capped at y_direct
            double slope = zone.dT(y);
            double y1 = y + Tk / std::max(slope, 1e-3);
            for (int it = 0; it < 50 && y1 < opt.y_direct; ++it) {
                const double f = zone.T(y1) - 2 * Tk;
                const double d = zone.dT(y1);
                const double dy = f / d;
                y1 -= dy;
                if (std::fabs(dy) < 1e-10 * y1) break;
            }
            if (y1 >= opt.y_direct || !std::isfinite(y1)) {
                y1 = opt.y_direct;
                analytic = true;
            }
            seg = N * integrate([&](double yy) { return zone.density(yy); }, y, y1, 1e-14, opt.rel_tol);
            y = y1;
            Tk = zone.T(y);
            alpha = zone.dT(y);
            M = zone.density(y) * Tk * Tk / alpha;
            v = 1 / Tk;
            tail = N * M * v;
        } else {
            // T = alpha y + beta and density = alpha M / T^2 up to exponentially small terms
            const double v1 = 0.5 * v;
            seg = N * M * (v - v1);
            v = v1;
            tail = N * M * v;
        }
        value += seg;
        if (!rep.estimates.empty() && tail > 0.95 * rep.estimates.back())
            ++stalls;
        else
            stalls = 0;
        rep.estimates.push_back(tail);
        if (stalls >= 3)
            throw Error(ErrorCode::EndpointDivergence, "tail estimates stopped decreasing at chart " + std::to_string(c.id));
        if (tail < threshold) break;
    }
    rep.closure = rep.estimates.back();
    rep.value = value + rep.closure;
    return rep;
}

}  // namespace

LambdaReport compute_lambda(const ActionModel& model, const SurfacePoint& A, const LambdaOptions& opt)
{
    LambdaReport out;
    const SurfaceModel& surface = model.surface();
    if (model.flat()) {
        const LeafChart& c = model.charts().front();
        double err = 0;
        const double v = integrate([&](double sg) { return model.density_dsigma(c, sg); }, c.lo, c.hi, 1e-13,
                                   opt.rel_tol, {}, &err);
        out.lambda = v;
        out.error_estimate = err;
        out.charts.push_back({c.id, v, err});
        return out;
    }
    const Effective& eff = model.effective();
    const double pA = surface.near_pole(A.s) ? 0.0 : eff.P(A.s);

    struct EndJob {
        const LeafChart* c;
        int crit, eps, N;
        double x;
    };
    std::vector<EndJob> ends;
    CompensatedSum interior_total;
    for (const LeafChart& c : model.charts()) {
        const double width = c.hi - c.lo;
        double xlo = c.lo_tag == EndTag::Hyperbolic ? opt.end_fraction * width : 0.0;
        double xhi = c.hi_tag == EndTag::Hyperbolic ? opt.end_fraction * width : 0.0;
        if (pA > c.lo && pA < c.hi) {
            if (std::fabs(pA - c.lo) <= 1e-12 * (1 + pA) || std::fabs(pA - c.hi) <= 1e-12 * (1 + pA))
                throw Error(ErrorCode::BoundaryAmbiguity, "P(A) coincides with a critical value");
            if (xlo > 0 && pA - c.lo < 2 * xlo) xlo = 0.5 * (pA - c.lo);
            if (xhi > 0 && c.hi - pA < 2 * xhi) xhi = 0.5 * (c.hi - pA);
        }
        const double ma = c.lo + xlo, mb = c.hi - xhi;
        std::vector<double> cuts{ma};
        if (pA > ma && pA < mb) cuts.push_back(pA);
        cuts.push_back(mb);
        CompensatedSum chart_sum;
        double chart_err = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double m0 = cuts[i], m1 = cuts[i + 1];
            const int N = model.count_NA(c, model.level(0.5 * (m0 + m1)), A);
            if (N == 0) continue;
            // parameter u in [0,1] mapped to sigma
            const double s0 = c.p_sign * kAngleUnit * m0, s1 = c.p_sign * kAngleUnit * m1;
            auto g = [&](double u) { return opt.reparametrize ? 0.5 * (u * u * u + u) : u; };
            auto sigma_of = [&](double u) { return s0 + (s1 - s0) * g(u); };
            auto dens = [&](double u) {
                const double sg = sigma_of(u);
                const double dist = std::min(u, 1 - u);
                const double h = std::min(1e-3, 0.2 * dist);
                auto nu = [&](double uu) {
                    const Frequencies f = model.frequencies(c, sigma_of(uu));
                    return Nu{f.nu1, f.nu2};
                };
                const auto w = richardson(nu, u, h);
                return N * model.density(c, model.level_of_sigma(c, sg), w);
            };
            double err = 0;
            const double v = integrate(dens, 0.0, 1.0, 1e-14, opt.rel_tol, {}, &err);
            chart_sum.add(v);
            chart_err += err;
        }
        out.charts.push_back({c.id, chart_sum.value(), chart_err});
        interior_total.add(chart_sum.value());
        if (xlo > 0) {
            const int N = model.count_NA(c, model.level_near(c.lo_crit, 0.5 * xlo, +1), A);
            if (N > 0) ends.push_back({&c, c.lo_crit, +1, N, xlo});
        }
        if (xhi > 0) {
            const int N = model.count_NA(c, model.level_near(c.hi_crit, 0.5 * xhi, -1), A);
            if (N > 0) ends.push_back({&c, c.hi_crit, -1, N, xhi});
        }
    }
    const double base = interior_total.value();
    const double threshold = ends.empty() ? 0.0 : std::max(1e-300, opt.tail_rel * base / ends.size());
    CompensatedSum total;
    total.add(base);
    for (const EndJob& e : ends) {
        TailReport r = integrate_end(model, *e.c, e.crit, e.eps, e.N, e.x, threshold, opt);
        out.charts[e.c->id].value += r.value;
        total.add(r.value);
        out.closure_total += r.closure;
        out.tails.push_back(r);
    }
    out.lambda = total.value();
    double err = 0;
    for (const auto& c : out.charts) err += c.error;
    out.error_estimate = err + 0.1 * out.closure_total;
    return out;
}

std::vector<ProfileRow> chart_profile(const ActionModel& model, const SurfacePoint& A, int per_chart)
{
    std::vector<ProfileRow> rows;
    for (const LeafChart& c : model.charts()) {
        for (int i = 0; i < per_chart; ++i) {
            const double u = (i + 0.5) / per_chart;
            const double sg = c.sigma_lo() + u * (c.sigma_hi() - c.sigma_lo());
            ProfileRow r;
            r.chart = c.id;
            r.sigma = sg;
            const auto p = model.actions(c, sg);
            r.p1 = p[0];
            r.p2 = p[1];
            const Frequencies f = model.frequencies(c, sg);
            r.nu1 = f.nu1;
            r.nu2 = f.nu2;
            r.density = model.density_dsigma(c, sg);
            try {
                r.N = model.count_NA(c, sg, A);
            } catch (const Error&) {
                r.N = -1;
            }
            rows.push_back(r);
        }
    }
    return rows;
}

}  // namespace fw
