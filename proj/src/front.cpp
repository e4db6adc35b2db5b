#include "front.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "error.hpp"
#include "parallel.hpp"

namespace fw {

namespace {

constexpr double kPi = std::numbers::pi;

struct WindowSpec {
    int crit = 0;
    int eps = 0;
    int p_sign = 1;
    int ps_sign = 1;
    double Pc = 0;
    double kappa = 1;
    double y0 = 0, y1 = 0;
    std::vector<int> saddles;  // hyperbolic points sharing the critical value
};

struct Sample {
    double u = 0;
    double t = 0;
    double h = 0;
    Vec8 y{};
    int phase = 0;
    std::array<Dual, 3> far{};
    std::array<Dual, 2> near{};
    Dual base{};
    int saddle = -1;
    double img = 0;
    std::array<double, 2> mer{};
    double f = 0;
};

struct Panel {
    int a, m, b;
};

struct Segment {
    enum Kind { Regular, Window, Pole } kind = Regular;
    int window = -1;
    std::vector<Sample> samples;
    std::vector<Panel> panels;
};

struct WinConst {
    Dual x, sx, m, p;
};

}  // namespace

struct Front::Impl {
    HamiltonianModel H;
    SurfaceModel surface;
    SurfacePoint A;
    FrontOptions opt;
    FlowSystem sys;
    FiberMap fiber;
    std::optional<Effective> eff;
    std::vector<WindowSpec> windows;
    std::vector<Segment> segments;
    double t_now = 0;
    long refined = 0;
    bool pole = false;
    std::vector<std::string> warnings;

    Impl(const HamiltonianModel& h, const SurfaceModel& s, const SurfacePoint& a, const FrontOptions& o)
        : H(h), surface(s), A(a), opt(o), sys(H, surface), fiber(H, surface, A)
    {
        surface.validate();
        H.validate(surface);
        if (surface.is_sphere() && surface.near_pole(A.s)) {
            pole = true;
            setup_pole();
            return;
        }
        if (surface.is_revolution()) eff.emplace(H, surface);
        setup();
    }

    // ---------- setup ----------
    void setup_pole()
    {
        Segment seg;
        seg.kind = Segment::Pole;
        const int n = std::max(4, opt.n0 / 2 * 2);
        const double r = fiber.radius();
        for (int i = 0; i <= n; ++i) {
            Sample sm;
            sm.u = 2 * kPi * i / n;
            sm.mer = {A.s < 0.5 * surface.L ? 0.0 : surface.L, r};
            seg.samples.push_back(sm);
        }
        for (int i = 0; i + 2 <= n; i += 2) seg.panels.push_back({i, i + 1, i + 2});
        segments.push_back(std::move(seg));
        for (auto& sm : segments[0].samples) sm.f = eval(segments[0], sm);
    }

    void setup()
    {
        const double r = fiber.radius(), aA = fiber.profile_at_A();
        const double pmax = r * aA;
        struct Arc {
            double lo, hi;
            int window;  // -1 for regular arcs
        };
        std::vector<Arc> arcs;
        if (opt.windows && eff) {
            const auto& cp = eff->critical();
            // distinct hyperbolic values below the Clairaut bound at A
            std::vector<double> values;
            for (const auto& c : cp) values.push_back(c.P);
            values.push_back(pmax);
            std::sort(values.begin(), values.end());
            double x0 = opt.window_x0;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                const double gap = values[i + 1] - values[i];
                if (gap > 1e-12 * pmax) x0 = std::min(x0, 0.25 * gap);
            }
            std::vector<int> done;
            for (std::size_t k = 0; k < cp.size(); ++k) {
                if (!cp[k].hyperbolic || !(cp[k].P < pmax - 2 * x0)) continue;
                bool dup = false;
                for (int d : done) dup |= cp[d].P == cp[k].P;
                if (dup) continue;
                done.push_back((int)k);
                std::vector<int> same;
                for (std::size_t j = 0; j < cp.size(); ++j)
                    if (cp[j].hyperbolic && std::fabs(cp[j].P - cp[k].P) <= 1e-12 * cp[k].P) same.push_back((int)j);
                const auto& e = eff->expansion((int)k);
                for (int ps : {1, -1})
                    for (int qs : {1, -1}) {
                        auto omega = [&](double p) {
                            const double c = ps * p / pmax;
                            return std::atan2(qs * std::sqrt(std::max(0.0, 1 - c * c)), c);
                        };
                        for (int eps : {1, -1}) {
                            WindowSpec w;
                            w.crit = (int)k;
                            w.eps = eps;
                            w.p_sign = ps;
                            w.ps_sign = qs;
                            w.Pc = cp[k].P;
                            w.kappa = e.kappa;
                            w.saddles = same;
                            w.y0 = std::log(1 / x0);
                            w.y1 = w.y0 + opt.window_margin;
                            windows.push_back(w);
                            double wa = omega(cp[k].P + eps * x0), wb = omega(cp[k].P);
                            wa = std::fmod(wa + 2 * kPi, 2 * kPi);
                            wb = std::fmod(wb + 2 * kPi, 2 * kPi);
                            arcs.push_back({std::min(wa, wb), std::max(wa, wb), (int)windows.size() - 1});
                        }
                    }
            }
        }
        std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
        std::vector<Arc> all;
        if (arcs.empty()) {
            all.push_back({0.0, 2 * kPi, -1});
        } else {
            for (std::size_t i = 0; i < arcs.size(); ++i) {
                all.push_back(arcs[i]);
                const double next = i + 1 < arcs.size() ? arcs[i + 1].lo : arcs[0].lo + 2 * kPi;
                if (next > arcs[i].hi) all.push_back({arcs[i].hi, next, -1});
            }
        }
        const int half = std::max(2, opt.n0 / 2);
        for (const Arc& arc : all) {
            Segment seg;
            if (arc.window < 0) {
                seg.kind = Segment::Regular;
                const int np = std::max(1, (int)std::lround(half * (arc.hi - arc.lo) / (2 * kPi)));
                for (int i = 0; i <= 2 * np; ++i) seg.samples.push_back(regular_sample(arc.lo + (arc.hi - arc.lo) * i / (2 * np)));
                for (int i = 0; i + 2 <= 2 * np; i += 2) seg.panels.push_back({i, i + 1, i + 2});
            } else {
                seg.kind = Segment::Window;
                seg.window = arc.window;
                const WindowSpec& w = windows[arc.window];
                seg.samples.push_back(window_sample(w, w.y0));
                append_window_panels(seg, w.y0, w.y1);
            }
            for (auto& sm : seg.samples) sm.f = eval(seg, sm);
            segments.push_back(std::move(seg));
        }
    }

    Sample regular_sample(double omega)
    {
        CotangentPoint pt = fiber(omega);
        auto d = fiber.derivative(omega);
        if (surface.is_sphere()) {
            // keep meridian samples off the poles
            const double floor_p = 1e-7 * fiber.clairaut_max();
            if (std::fabs(pt.p_theta) < floor_p) pt.p_theta = (std::sin(omega) * std::cos(omega) >= 0 ? 1 : -1) * floor_p;
        }
        Sample sm;
        sm.u = omega;
        sm.y = {pt.theta, pt.s, pt.p_theta, pt.p_s, 0.0, 0.0, d[0], d[1]};
        return sm;
    }

    WinConst wconst(const WindowSpec& w, double y) const
    {
        const double ex = std::exp(-y), esx = std::exp(-0.5 * y);
        WinConst k;
        k.x = Dual(ex, -ex);
        k.sx = Dual(esx, -0.5 * esx);
        k.m = w.Pc + w.eps * k.x;
        k.p = w.p_sign * k.m;
        return k;
    }

    Sample window_sample(const WindowSpec& w, double y)
    {
        const WinConst k = wconst(w, y);
        const double r = fiber.radius(), aA = fiber.profile_at_A();
        const Dual q = r * r - k.m * k.m / (aA * aA);
        Sample sm;
        sm.u = y;
        sm.phase = 0;
        sm.far = {Dual(A.theta), Dual(A.s), w.ps_sign * sqrt(q)};
        int j;
        double img;
        if (near_saddle(w, sm.far[1].v, j, img)) enter_near(sm, w, j, img);
        return sm;
    }

    void append_window_panels(Segment& seg, double from, double to)
    {
        const WindowSpec& w = windows[seg.window];
        const int np = std::max(1, (int)std::ceil((to - from) / opt.window_panel));
        int prev = seg.panels.empty() ? 0 : seg.panels.back().b;
        for (int i = 1; i <= 2 * np; i += 2) {
            const int mid = (int)seg.samples.size();
            seg.samples.push_back(window_sample(w, from + (to - from) * i / (2 * np)));
            seg.samples.push_back(window_sample(w, from + (to - from) * (i + 1) / (2 * np)));
            seg.panels.push_back({prev, mid, mid + 1});
            prev = mid + 1;
        }
    }

    // ---------- window dynamics ----------
    double image(double sc, double s) const
    {
        return surface.s_periodic() ? sc + surface.L * std::round((s - sc) / surface.L) : sc;
    }

    bool near_saddle(const WindowSpec& w, double s, int& j, double& img) const
    {
        for (int k : w.saddles) {
            const auto& e = eff->expansion(k);
            const double im = image(e.s_c, s);
            if (std::fabs(s - im) < 0.9 * e.delta1) {
                j = k;
                img = im;
                return true;
            }
        }
        return false;
    }

    void enter_near(Sample& sm, const WindowSpec& w, int j, double img) const
    {
        const auto& e = eff->expansion(j);
        const WinConst k = wconst(w, sm.u);
        const Dual d = sm.far[1] - img;
        Dual phi;
        if (w.eps > 0) {
            const int side = d.v > 0 ? 1 : -1;
            const Dual c = 2 * w.Pc + k.x;
            Dual eta = sqrt(c / e.r[0]);
            for (int it = 0; it < 40; ++it) {
                const Dual z = side * k.sx * eta;
                const Dual F = eta * eta * e.R(z) - c;
                const Dual dF = 2 * eta * e.R(z) + eta * eta * side * k.sx * e.R1(z);
                const Dual step = F / dF;
                eta -= step;
                if (std::fabs(step.v) <= 1e-16 * eta.v && std::fabs(step.d) <= 1e-16 * (std::fabs(eta.d) + 1e-300)) break;
            }
            sm.base = side * k.sx * eta;
            Dual z = abs(d) / (k.sx * eta);
            if (z.v < 1) z = Dual(1.0, 0.0);
            phi = acosh_big(z);
            if (sm.far[2].v * d.v < 0) phi = -phi;
        } else {
            const int dir = sm.far[2].v > 0 ? 1 : -1;
            const Dual eta = sqrt((2 * w.Pc - k.x) / e.r[0]);
            sm.base = dir * k.sx * eta;
            phi = asinh_big(d / sm.base);
        }
        sm.near = {sm.far[0], phi};
        sm.phase = 1;
        sm.saddle = j;
        sm.img = img;
        sm.h = 0;
    }

    template <class T>
    void check_pole(const T& s) const
    {
        if (surface.is_sphere() && (value(s) <= surface.pole_tolerance() || value(s) >= surface.L - surface.pole_tolerance()))
            throw Error(ErrorCode::PoleCrossing, "window trajectory reached a pole");
    }

    void far_rhs(const WinConst& k, const std::array<Dual, 3>& z, std::array<Dual, 3>& dz) const
    {
        check_pole(z[1]);
        Dual a, a1, a2, v1, v2;
        sys.profile(z[1], a, a1, a2);
        sys.potential(z[1], v1, v2);
        const Dual ia2 = 1.0 / (a * a);
        dz[0] = k.p * ia2;
        dz[1] = z[2];
        dz[2] = k.p * k.p * a1 * ia2 / a - v1;
    }

    Dual near_delta(const WindowSpec& w, const Sample& sm, const Dual& phi) const
    {
        return w.eps > 0 ? sm.base * cosh(phi) : sm.base * sinh(phi);
    }

    void near_rhs(const WindowSpec& w, const WinConst& k, const Sample& sm, const std::array<Dual, 2>& z,
                  std::array<Dual, 2>& dz) const
    {
        const auto& e = eff->expansion(sm.saddle);
        const Dual d = near_delta(w, sm, z[1]);
        const Dual s = sm.img + d;
        Dual a, a1, a2;
        sys.profile(s, a, a1, a2);
        Dual den2;
        if (w.eps > 0) {
            const Dual sech = 1.0 / cosh(0.5 * z[1]);
            den2 = e.R(d) + sm.base * e.divided(d, sm.base) * (0.5 * sech * sech);
        } else {
            const Dual th = tanh(z[1]);
            const Dual sech = 1.0 / cosh(z[1]);
            den2 = th * th * e.R(d) + e.r[0] * sech * sech;
        }
        dz[0] = k.p / (a * a);
        dz[1] = sqrt(den2) / a;
    }

    void exit_near(Sample& sm, const WindowSpec& w, const WinConst& k) const
    {
        std::array<Dual, 2> dz;
        near_rhs(w, k, sm, sm.near, dz);
        const Dual phi = sm.near[1];
        const Dual d = near_delta(w, sm, phi);
        const Dual ps = (w.eps > 0 ? sm.base * sinh(phi) : sm.base * cosh(phi)) * dz[1];
        sm.far = {sm.near[0], sm.img + d, ps};
        sm.phase = 0;
        sm.saddle = -1;
        sm.h = 0;
    }

    void advance_window(Sample& sm, const WindowSpec& w, double t_end) const
    {
        const WinConst k = wconst(w, sm.u);
        IntegratorConfig cfg = opt.integ;
        cfg.max_step = std::min(cfg.max_step, 0.5 / w.kappa);
        while (sm.t < t_end) {
            if (sm.phase == 0) {
                Dop853<Dual, 3> ode;
                auto f = [&](double, const std::array<Dual, 3>& z, std::array<Dual, 3>& dz) { far_rhs(k, z, dz); };
                int j = -1;
                double img = 0;
                const bool hit = ode.run(f, sm.t, sm.far, t_end, sm.h, cfg, [&](double, const std::array<Dual, 3>& z) {
                    return near_saddle(w, z[1].v, j, img);
                });
                if (hit) enter_near(sm, w, j, img);
            } else {
                Dop853<Dual, 2> ode;
                auto f = [&](double, const std::array<Dual, 2>& z, std::array<Dual, 2>& dz) { near_rhs(w, k, sm, z, dz); };
                const double d1 = eff->expansion(sm.saddle).delta1;
                const bool out = ode.run(f, sm.t, sm.near, t_end, sm.h, cfg, [&](double, const std::array<Dual, 2>& z) {
                    return z[1].v > 0 && std::fabs(near_delta(w, sm, z[1]).v) >= d1;
                });
                if (out) exit_near(sm, w, k);
            }
        }
    }

    // ---------- evaluation ----------
    void advance_sample(const Segment& seg, Sample& sm, double t_end) const
    {
        if (!(t_end > sm.t)) return;
        switch (seg.kind) {
        case Segment::Regular: {
            Dop853<double, 8> ode;
            auto f = [&](double, const Vec8& z, Vec8& dz) { sys.variational(z.data(), dz.data()); };
            ode.run(f, sm.t, sm.y, t_end, sm.h, opt.integ);
            break;
        }
        case Segment::Window: advance_window(sm, windows[seg.window], t_end); break;
        case Segment::Pole:
            sm.mer = advance_meridian(H, surface, sm.mer, sm.t, t_end, opt.integ);
            sm.t = t_end;
            break;
        }
        sm.f = eval(seg, sm);
    }

    double profile(double s) const { return surface.kind == SurfaceKind::FlatTorus ? 1.0 : surface.a(s); }

    double eval(const Segment& seg, const Sample& sm) const
    {
        switch (seg.kind) {
        case Segment::Regular: {
            const double a = profile(sm.y[1]);
            return std::sqrt(a * a * sm.y[4] * sm.y[4] + sm.y[5] * sm.y[5]);
        }
        case Segment::Window: {
            double s, th_d, s_d;
            if (sm.phase == 0) {
                s = sm.far[1].v;
                th_d = sm.far[0].d;
                s_d = sm.far[1].d;
            } else {
                const Dual d = near_delta(windows[seg.window], sm, sm.near[1]);
                s = sm.img + d.v;
                th_d = sm.near[0].d;
                s_d = d.d;
            }
            const double a = profile(s);
            return std::sqrt(a * a * th_d * th_d + s_d * s_d);
        }
        case Segment::Pole: return std::fabs(surface.a(sm.mer[0]));
        }
        return 0;
    }

    SurfacePoint position(const Segment& seg, const Sample& sm) const
    {
        SurfacePoint p;
        switch (seg.kind) {
        case Segment::Regular: p = {sm.y[0], sm.y[1]}; break;
        case Segment::Window:
            if (sm.phase == 0)
                p = {sm.far[0].v, sm.far[1].v};
            else
                p = {sm.near[0].v, sm.img + near_delta(windows[seg.window], sm, sm.near[1]).v};
            break;
        case Segment::Pole: {
            const double L = surface.L;
            const bool flip = sm.mer[0] > L;
            p = {sm.u + (flip ? kPi : 0.0), flip ? 2 * L - sm.mer[0] : sm.mer[0]};
            break;
        }
        }
        return reduce(surface, p);
    }

    void advance_all(double t_end)
    {
        std::vector<std::pair<int, int>> jobs;
        for (int s = 0; s < (int)segments.size(); ++s)
            for (int i = 0; i < (int)segments[s].samples.size(); ++i)
                if (segments[s].samples[i].t < t_end) jobs.push_back({s, i});
        parallel_for(jobs.size(), [&](std::size_t j) {
            Segment& seg = segments[jobs[j].first];
            advance_sample(seg, seg.samples[jobs[j].second], t_end);
        });
    }

    // ---------- quadrature and refinement ----------
    double width(const Segment& seg, const Panel& p) const { return seg.samples[p.b].u - seg.samples[p.a].u; }

    void panel_values(const Segment& seg, const Panel& p, double& simpson, double& err) const
    {
        const double w = width(seg, p);
        const double fa = seg.samples[p.a].f, fm = seg.samples[p.m].f, fb = seg.samples[p.b].f;
        simpson = w / 6 * (fa + 4 * fm + fb);
        const double trap = w / 4 * (fa + 2 * fm + fb);
        err = std::fabs(simpson - trap);
    }

    double total_length() const
    {
        CompensatedSum sum;
        for (const auto& seg : segments)
            for (const auto& p : seg.panels) {
                double v, e;
                panel_values(seg, p, v, e);
                sum.add(v);
            }
        return sum.value();
    }

    double masked_length(const Mask& mask) const
    {
        CompensatedSum sum;
        for (const auto& seg : segments)
            for (const auto& p : seg.panels) {
                const double w = width(seg, p);
                auto g = [&](int i) { return mask.contains(position(seg, seg.samples[i])) ? seg.samples[i].f : 0.0; };
                sum.add(w / 6 * (g(p.a) + 4 * g(p.m) + g(p.b)));
            }
        return sum.value();
    }

    double max_error() const
    {
        double m = 0;
        for (const auto& seg : segments)
            for (const auto& p : seg.panels) {
                double v, e;
                panel_values(seg, p, v, e);
                m = std::max(m, e);
            }
        return m;
    }

    long count() const
    {
        long n = 0;
        for (const auto& seg : segments) n += (long)seg.samples.size();
        return n;
    }

    Sample make_sample(const Segment& seg, double u)
    {
        if (seg.kind == Segment::Regular) return regular_sample(u);
        if (seg.kind == Segment::Window) return window_sample(windows[seg.window], u);
        Sample sm = seg.samples.front();
        sm.u = u;
        return sm;
    }

    void refine()
    {
        for (int round = 0; round < 200; ++round) {
            struct Cand {
                double err;
                int seg, panel;
            };
            std::vector<Cand> cands;
            CompensatedSum E, Lsum;
            for (int s = 0; s < (int)segments.size(); ++s)
                for (int p = 0; p < (int)segments[s].panels.size(); ++p) {
                    double v, e;
                    panel_values(segments[s], segments[s].panels[p], v, e);
                    E.add(e);
                    Lsum.add(v);
                    cands.push_back({e, s, p});
                }
            const double Ltot = Lsum.value(), Etot = E.value();
            if (!(Ltot > 0) || Etot <= opt.tol * Ltot) return;
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                if (a.err != b.err) return a.err > b.err;
                if (a.seg != b.seg) return a.seg < b.seg;
                return a.panel < b.panel;
            });
            const double target = Etot - 0.5 * opt.tol * Ltot;
            double acc = 0;
            std::vector<Cand> chosen;
            for (const Cand& c : cands) {
                if (acc >= target) break;
                const Segment& seg = segments[c.seg];
                const Panel& p = seg.panels[c.panel];
                if (width(seg, p) < 1e-13 * (1 + std::fabs(seg.samples[p.a].u))) continue;
                chosen.push_back(c);
                acc += c.err;
            }
            if (chosen.empty()) {
                warnings.push_back("refinement stalled at t=" + std::to_string(t_now));
                return;
            }
            if (count() + 2 * (long)chosen.size() > opt.max_samples)
                throw Error(ErrorCode::RefinementBudgetExceeded,
                            "front needs more than " + std::to_string(opt.max_samples) + " samples at t=" + std::to_string(t_now));
            std::sort(chosen.begin(), chosen.end(), [](const Cand& a, const Cand& b) {
                if (a.seg != b.seg) return a.seg < b.seg;
                return a.panel > b.panel;
            });
            std::vector<std::pair<int, int>> fresh;
            for (const Cand& c : chosen) {
                Segment& seg = segments[c.seg];
                const Panel p = seg.panels[c.panel];
                const double ua = seg.samples[p.a].u, um = seg.samples[p.m].u, ub = seg.samples[p.b].u;
                const int q1 = (int)seg.samples.size();
                seg.samples.push_back(make_sample(seg, 0.5 * (ua + um)));
                seg.samples.push_back(make_sample(seg, 0.5 * (um + ub)));
                fresh.push_back({c.seg, q1});
                fresh.push_back({c.seg, q1 + 1});
                seg.panels[c.panel] = {p.a, q1, p.m};
                seg.panels.insert(seg.panels.begin() + c.panel + 1, Panel{p.m, q1 + 1, p.b});
            }
            refined += (long)fresh.size();
            parallel_for(fresh.size(), [&](std::size_t j) {
                Segment& seg = segments[fresh[j].first];
                Sample& sm = seg.samples[fresh[j].second];
                advance_sample(seg, sm, t_now);
                sm.f = eval(seg, sm);
            });
        }
        warnings.push_back("refinement rounds exhausted at t=" + std::to_string(t_now));
    }

    void extend_windows(double t_end)
    {
        for (auto& seg : segments) {
            if (seg.kind != Segment::Window) continue;
            WindowSpec& w = windows[seg.window];
            const double target = std::min(opt.y_cap, w.y0 + 2 * w.kappa * t_end + opt.window_margin);
            if (target > w.y1 + 0.5 * opt.window_panel) {
                append_window_panels(seg, w.y1, target);
                w.y1 = target;
            }
        }
    }

    void evolve(double t_target)
    {
        if (t_target < t_now) throw Error(ErrorCode::Precondition, "front cannot be evolved backwards");
        while (t_now < t_target) {
            const double cadence = std::min(opt.checkpoint_dt, std::max(1.0, 0.25 * t_now));
            double stop = std::min(t_target, t_now + cadence);
            if (t_target - stop < 1e-9 * (1 + t_target)) stop = t_target;
            extend_windows(stop);
            advance_all(stop);
            t_now = stop;
            refine();
        }
    }
};

Front::Front(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A, const FrontOptions& opt)
    : impl_(std::make_unique<Impl>(H, surface, A, opt))
{
}

Front::~Front() = default;

void Front::evolve(double t) { impl_->evolve(t); }
double Front::time() const { return impl_->t_now; }
double Front::length() const { return impl_->total_length(); }
double Front::length(const Mask& mask) const { return impl_->masked_length(mask); }
long Front::refined() const { return impl_->refined; }
double Front::max_panel_error() const { return impl_->max_error(); }
long Front::sample_count() const { return impl_->count(); }
int Front::window_count() const { return (int)impl_->windows.size(); }
bool Front::pole_start() const { return impl_->pole; }
const std::vector<std::string>& Front::warnings() const { return impl_->warnings; }

double Front::truncation_estimate() const
{
    double acc = 0;
    for (const auto& seg : impl_->segments) {
        if (seg.kind != Segment::Window || seg.panels.empty()) continue;
        acc += seg.samples[seg.panels.back().b].f;
    }
    return acc;
}

std::vector<std::pair<std::string, double>> Front::segment_lengths() const
{
    std::vector<std::pair<std::string, double>> out;
    for (const auto& seg : impl_->segments) {
        CompensatedSum sum;
        for (const auto& p : seg.panels) {
            double v, e;
            impl_->panel_values(seg, p, v, e);
            sum.add(v);
        }
        std::string name = seg.kind == Segment::Regular ? "regular" : seg.kind == Segment::Pole ? "pole" : "window";
        if (seg.kind == Segment::Window) {
            const auto& w = impl_->windows[seg.window];
            name += "[crit=" + std::to_string(w.crit) + ",eps=" + std::to_string(w.eps) + ",p=" + std::to_string(w.p_sign) +
                    ",ps=" + std::to_string(w.ps_sign) + "]";
        }
        out.push_back({name, sum.value()});
    }
    return out;
}

double Front::polyline_length() const
{
    const auto& I = *impl_;
    const double period = I.surface.theta_period();
    CompensatedSum sum;
    for (const auto& seg : I.segments) {
        if (seg.panels.empty()) continue;
        std::vector<int> order{seg.panels.front().a};
        for (const auto& p : seg.panels) {
            order.push_back(p.m);
            order.push_back(p.b);
        }
        for (std::size_t i = 1; i < order.size(); ++i) {
            const SurfacePoint u = I.position(seg, seg.samples[order[i - 1]]);
            const SurfacePoint v = I.position(seg, seg.samples[order[i]]);
            const double dth = std::remainder(v.theta - u.theta, period);
            double ds = v.s - u.s;
            if (I.surface.s_periodic()) ds = std::remainder(ds, I.surface.L);
            const double a = I.profile(u.s + 0.5 * ds);
            sum.add(std::sqrt(a * a * dth * dth + ds * ds));
        }
    }
    return sum.value();
}

std::vector<SurfacePoint> Front::positions() const
{
    std::vector<SurfacePoint> out;
    for (const auto& seg : impl_->segments)
        for (const auto& p : seg.panels) {
            if (&p == &seg.panels.front()) out.push_back(impl_->position(seg, seg.samples[p.a]));
            out.push_back(impl_->position(seg, seg.samples[p.m]));
            out.push_back(impl_->position(seg, seg.samples[p.b]));
        }
    return out;
}

std::vector<SeriesRow> length_series(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                                     const std::vector<double>& times, const FrontOptions& opt, const std::vector<Mask>& masks)
{
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw Error(ErrorCode::Precondition, "times must be increasing");
    Front front(H, surface, A, opt);
    std::vector<SeriesRow> rows;
    for (double t : times) {
        front.evolve(t);
        SeriesRow r;
        r.t = t;
        r.length = front.length();
        r.refined = front.refined();
        r.max_pair_error = front.max_panel_error();
        for (const Mask& m : masks) r.masked.push_back(front.length(m));
        rows.push_back(r);
    }
    return rows;
}

std::vector<double> log_spaced_times(double t_min, double t_max, int n)
{
    if (!(t_min > 0) || !(t_max > t_min) || n < 2) throw Error(ErrorCode::Precondition, "bad time grid");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = t_min * std::pow(t_max / t_min, double(i) / (n - 1));
    out.back() = t_max;
    return out;
}

SlopeEstimate slope_estimate(const std::vector<SeriesRow>& series, double tail_fraction)
{
    const int n = (int)series.size();
    const int k = (int)std::ceil(tail_fraction * n);
    if (k < 8 || k > n) throw Error(ErrorCode::InsufficientTail, "tail window has " + std::to_string(k) + " points, need 8");
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (int i = n - k; i < n; ++i) {
        st += series[i].t;
        sl += series[i].length;
        stt += series[i].t * series[i].t;
        stl += series[i].t * series[i].length;
    }
    SlopeEstimate e;
    e.n_used = k;
    const double den = k * stt - st * st;
    e.slope = (k * stl - st * sl) / den;
    e.intercept = (sl - e.slope * st) / k;
    for (int i = n - k; i < n; ++i)
        e.uncertainty = std::max(e.uncertainty, std::fabs(series[i].length / series[i].t - e.slope));
    e.t_from = series[n - k].t;
    e.t_to = series[n - 1].t;
    return e;
}

}  // namespace fw
