#include "actions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "error.hpp"
#include "flow.hpp"

namespace fw {

namespace {
constexpr double kPi = std::numbers::pi;

template <class F>
double bisect_root(F&& f, double a, double b)
{
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b) && !(m < a && m > b)) break;
        const double fm = f(m);
        if (fm == 0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}
}  // namespace

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::Oscillating: return "oscillating";
    case Regime::Circulating: return "circulating";
    case Regime::Flat: return "flat";
    }
    return "?";
}

std::string to_string(EndTag t)
{
    switch (t) {
    case EndTag::Seam: return "seam";
    case EndTag::Elliptic: return "elliptic";
    case EndTag::Hyperbolic: return "hyperbolic";
    case EndTag::Periodic: return "periodic";
    }
    return "?";
}

double LeafChart::sigma_lo() const
{
    if (regime == Regime::Flat) return lo;
    return p_sign > 0 ? kAngleUnit * lo : -kAngleUnit * hi;
}

double LeafChart::sigma_hi() const
{
    if (regime == Regime::Flat) return hi;
    return p_sign > 0 ? kAngleUnit * hi : -kAngleUnit * lo;
}

bool LeafChart::contains_sigma(double sigma) const { return sigma > sigma_lo() && sigma < sigma_hi(); }

ActionModel::ActionModel(const HamiltonianModel& H, const SurfaceModel& surface, ActionOptions opt)
    : H_(H), surface_(surface), opt_(opt), flat_(surface.kind == SurfaceKind::FlatTorus)
{
    surface_.validate();
    H_.validate(surface_);
    if (flat_) {
        if (H_.kind != HamiltonianKind::Geodesic)
            throw Error(ErrorCode::Precondition, "action-angle data on the flat torus are implemented for the geodesic kind only");
        flat_charts();
        return;
    }
    eff_.emplace_back(H_, surface_);
    enumerate_charts();
}

const Effective& ActionModel::effective() const
{
    if (eff_.empty()) throw Error(ErrorCode::Precondition, "no Clairaut reduction on the flat torus");
    return eff_.front();
}

const std::vector<CriticalPoint>& ActionModel::critical_points() const
{
    static const std::vector<CriticalPoint> none;
    return eff_.empty() ? none : eff_.front().critical();
}

std::vector<SingularLeaf> ActionModel::singular_leaves() const
{
    std::vector<SingularLeaf> out;
    const auto& cp = critical_points();
    for (std::size_t i = 0; i < cp.size(); ++i) out.push_back({(int)i, cp[i].s, cp[i].P, cp[i].hyperbolic});
    return out;
}

const LeafChart& ActionModel::chart(int id) const
{
    if (id < 0 || id >= (int)charts_.size()) throw Error(ErrorCode::Precondition, "unknown chart id " + std::to_string(id));
    return charts_[id];
}

double ActionModel::flat_radius() const { return std::sqrt(2 * H_.E); }

void ActionModel::flat_charts()
{
    LeafChart c;
    c.id = 0;
    c.regime = Regime::Flat;
    c.lo = 0;
    c.hi = 2 * kPi;
    c.lo_tag = c.hi_tag = EndTag::Periodic;
    charts_.push_back(c);
}

void ActionModel::enumerate_charts()
{
    const Effective& eff = effective();
    const auto& cp = eff.critical();
    if (cp.empty()) throw Error(ErrorCode::MorseViolation, "Clairaut function has no critical points");
    std::vector<double> levels{0.0};
    for (const auto& c : cp) levels.push_back(c.P);
    std::sort(levels.begin(), levels.end());
    std::vector<double> uniq;
    for (double v : levels)
        if (uniq.empty() || v - uniq.back() > 1e-12 * std::max(1.0, v)) uniq.push_back(v);
    const int K = std::max(1, eff.P2_series().harmonics());
    const int N = std::max(4096, 256 * K);
    const double L = eff.period();
    std::vector<double> grid(N);
    for (int i = 0; i < N; ++i) grid[i] = eff.P2(L * (i + 0.5) / N);

    struct Family {
        std::vector<int> maxima;
        bool circ;
        int first, last;  // interval indices
    };
    std::vector<Family> families;
    std::map<std::pair<std::vector<int>, bool>, int> open;  // key -> family index for the previous interval
    for (std::size_t iv = 0; iv + 1 < uniq.size(); ++iv) {
        const double mm = 0.5 * (uniq[iv] + uniq[iv + 1]);
        std::vector<char> up(N);
        int nup = 0;
        for (int i = 0; i < N; ++i) nup += (up[i] = grid[i] > mm * mm);
        std::vector<std::pair<std::vector<int>, bool>> keys;
        if (nup == N && eff.periodic()) {
            std::vector<int> mx;
            for (std::size_t k = 0; k < cp.size(); ++k)
                if (!cp[k].hyperbolic) mx.push_back((int)k);
            keys.push_back({mx, true});
        } else {
            // label runs, joining across the period on the torus
            std::vector<int> label(N, -1);
            int nl = 0;
            for (int i = 0; i < N; ++i) {
                if (!up[i]) continue;
                if (i > 0 && up[i - 1])
                    label[i] = label[i - 1];
                else
                    label[i] = nl++;
            }
            if (eff.periodic() && up[0] && up[N - 1]) {
                const int from = label[N - 1], to = label[0];
                for (int i = 0; i < N; ++i)
                    if (label[i] == from) label[i] = to;
            }
            std::map<int, std::vector<int>> members;
            for (std::size_t k = 0; k < cp.size(); ++k) {
                if (cp[k].hyperbolic || !(cp[k].P > mm)) continue;
                int idx = std::min(N - 1, std::max(0, (int)std::floor(cp[k].s / L * N)));
                if (label[idx] < 0) {
                    // the maximum sits on a cell boundary; look at neighbours
                    for (int d : {-1, 1}) {
                        int j = (idx + d + N) % N;
                        if (label[j] >= 0) {
                            idx = j;
                            break;
                        }
                    }
                }
                if (label[idx] < 0) throw Error(ErrorCode::MorseViolation, "could not locate a maximum in its component");
                members[label[idx]].push_back((int)k);
            }
            for (auto& [lab, mx] : members) {
                std::sort(mx.begin(), mx.end());
                keys.push_back({mx, false});
            }
        }
        std::map<std::pair<std::vector<int>, bool>, int> next;
        for (const auto& key : keys) {
            auto it = open.find(key);
            if (it != open.end()) {
                families[it->second].last = (int)iv;
                next[key] = it->second;
            } else {
                families.push_back({key.first, key.second, (int)iv, (int)iv});
                next[key] = (int)families.size() - 1;
            }
        }
        open = std::move(next);
    }

    auto crit_at_level = [&](double P, const std::vector<int>& prefer, bool hyperbolic) {
        int best = -1;
        double bd = 1e300;
        for (std::size_t k = 0; k < cp.size(); ++k) {
            if (cp[k].hyperbolic != hyperbolic) continue;
            const double d = std::fabs(cp[k].P - P);
            const bool pref = std::find(prefer.begin(), prefer.end(), (int)k) != prefer.end();
            if (d < bd - 1e-14 || (pref && d <= bd + 1e-14)) {
                bd = d;
                best = (int)k;
            }
        }
        return best;
    };

    std::sort(families.begin(), families.end(), [&](const Family& a, const Family& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.maxima < b.maxima;
    });
    int id = 0;
    for (const Family& f : families) {
        LeafChart base;
        base.regime = f.circ ? Regime::Circulating : Regime::Oscillating;
        base.lo = uniq[f.first];
        base.hi = uniq[f.last + 1];
        base.maxima = f.maxima;
        double best = -1;
        for (int k : f.maxima)
            if (cp[k].P > best) {
                best = cp[k].P;
                base.s_rep = cp[k].s;
            }
        if (base.lo == 0) {
            base.lo_tag = EndTag::Seam;
        } else {
            base.lo_tag = EndTag::Hyperbolic;
            base.lo_crit = crit_at_level(base.lo, {}, true);
        }
        if (!f.circ && f.maxima.size() == 1 && std::fabs(cp[f.maxima[0]].P - base.hi) <= 1e-12 * base.hi) {
            base.hi_tag = EndTag::Elliptic;
            base.hi_crit = f.maxima[0];
        } else {
            base.hi_tag = EndTag::Hyperbolic;
            base.hi_crit = crit_at_level(base.hi, {}, true);
        }
        for (int ps : {1, -1}) {
            if (f.circ) {
                for (int qs : {1, -1}) {
                    LeafChart c = base;
                    c.id = id++;
                    c.p_sign = ps;
                    c.ps_sign = qs;
                    charts_.push_back(c);
                }
            } else {
                LeafChart c = base;
                c.id = id++;
                c.p_sign = ps;
                charts_.push_back(c);
            }
        }
    }
}

double ActionModel::near_threshold(int k) const
{
    const auto& e = effective().expansion(k);
    return e.r[0] * e.delta1 * e.delta1 / (32 * e.Pc);
}

ActionModel::Offset ActionModel::offset_for(int k, const Level& lv) const
{
    const auto& cp = critical_points();
    Offset o;
    if (!cp[k].hyperbolic) return o;
    if (lv.crit == k || (lv.crit >= 0 && cp[lv.crit].P == cp[k].P)) {
        o.x = lv.x;
        o.eps = lv.eps;
    } else {
        const double d = lv.m - cp[k].P;
        o.x = std::fabs(d);
        o.eps = d > 0 ? 1 : -1;
    }
    o.valid = o.x < near_threshold(k);
    return o;
}

Level ActionModel::level(double m) const
{
    Level lv;
    lv.m = m;
    if (flat_) return lv;
    const auto& cp = critical_points();
    double best = 1e300;
    for (std::size_t k = 0; k < cp.size(); ++k) {
        if (!cp[k].hyperbolic) continue;
        const double d = m - cp[k].P;
        if (std::fabs(d) < best && std::fabs(d) < near_threshold((int)k)) {
            best = std::fabs(d);
            lv.crit = (int)k;
            lv.x = std::fabs(d);
            lv.eps = d > 0 ? 1 : -1;
        }
    }
    return lv;
}

Level ActionModel::level_near(int crit, double x, int eps) const
{
    const auto& cp = critical_points();
    if (crit < 0 || crit >= (int)cp.size() || !cp[crit].hyperbolic)
        throw Error(ErrorCode::Precondition, "level_near needs a hyperbolic critical point");
    Level lv;
    lv.crit = crit;
    lv.x = x;
    lv.eps = eps;
    lv.m = cp[crit].P + eps * x;
    return lv;
}

Level ActionModel::level_of_sigma(const LeafChart& c, double sigma) const
{
    if (c.regime == Regime::Flat) {
        Level lv;
        lv.m = sigma;
        return lv;
    }
    if (!c.contains_sigma(sigma))
        throw Error(ErrorCode::Precondition, "sigma=" + std::to_string(sigma) + " outside chart " + std::to_string(c.id));
    return level(std::fabs(sigma) / kAngleUnit);
}

Orbit ActionModel::build_orbit(const LeafChart& c, const Level& lv) const
{
    if (flat_) throw Error(ErrorCode::Precondition, "no orbit quadrature on the flat torus");
    const Effective& eff = effective();
    const auto& cp = eff.critical();
    Orbit o;
    o.oscillating = c.regime == Regime::Oscillating;
    o.m = lv.m;
    o.m2 = lv.m * lv.m;
    o.p_sign = c.p_sign;
    const double L = eff.period();
    const bool periodic = eff.periodic();

    struct Near {
        int k;
        double x;
        int eps;
        const SaddleExpansion* e;
    };
    std::vector<Near> near;
    double h = L / 2048;
    for (std::size_t k = 0; k < cp.size(); ++k) {
        if (!cp[k].hyperbolic) continue;
        const Offset off = offset_for((int)k, lv);
        if (!off.valid) continue;
        if (off.x == 0) throw Error(ErrorCode::Precondition, "level lies on a separatrix");
        const auto& e = eff.expansion((int)k);
        near.push_back({(int)k, off.x, off.eps, &e});
        h = std::min(h, 0.25 * e.delta1);
    }
    auto nearest_image = [&](double sc, double s) { return periodic ? sc + L * std::round((s - sc) / L) : sc; };

    struct End {
        bool regular = true;
        double s = 0;
        const Near* sad = nullptr;
        double dt = 0;
    };
    auto walk = [&](int dir) {
        double s = c.s_rep;
        const long max_it = (long)(4 * L / h) + 16;
        for (long it = 0; it < max_it; ++it) {
            double sn = s + dir * h;
            for (const Near& ns : near) {
                if (ns.eps < 0) continue;
                const double img = nearest_image(ns.e->s_c, sn);
                if (std::fabs(sn - img) < ns.e->delta1) {
                    End e;
                    e.regular = false;
                    e.s = img;
                    e.sad = &ns;
                    e.dt = ns.e->solve_turning(ns.x * (2 * ns.e->Pc + ns.x), -dir);
                    return e;
                }
            }
            if (!periodic) sn = std::clamp(sn, 0.0, L);
            if (eff.P2(sn) - o.m2 <= 0) {
                End e;
                e.s = bisect_root([&](double z) { return eff.P2(z) - o.m2; }, s, sn);
                return e;
            }
            s = sn;
        }
        throw Error(ErrorCode::TurningPointFailure, "no turning point found for |p|=" + std::to_string(lv.m));
    };

    struct Span {
        double a, b, anchor;
        OrbitPiece piece;
    };
    std::vector<Span> spans;
    End left, right;
    if (o.oscillating) {
        left = walk(-1);
        right = walk(1);
        o.s_lo = left.regular ? left.s : left.s + left.dt;
        o.s_hi = right.regular ? right.s : right.s - right.dt;
        if (!left.regular) {
            OrbitPiece p{OrbitPiece::SaddleOsc, 0, 0, left.s, +1, left.dt, left.sad->k};
            spans.push_back({left.s + left.dt, left.s + left.sad->e->delta1, left.s + left.dt, p});
        }
        if (!right.regular) {
            OrbitPiece p{OrbitPiece::SaddleOsc, 0, 0, right.s, -1, right.dt, right.sad->k};
            spans.push_back({right.s - right.sad->e->delta1, right.s - right.dt, right.s - right.dt, p});
        }
    } else {
        o.s_lo = c.s_rep;
        o.s_hi = c.s_rep + L;
        left.regular = right.regular = false;
    }
    for (const Near& ns : near) {
        if (ns.eps > 0) continue;
        const double d0 = std::sqrt(ns.x * (2 * ns.e->Pc - ns.x) / ns.e->r[0]);
        double img = periodic ? ns.e->s_c + L * std::ceil((o.s_lo - ns.e->s_c) / L) : ns.e->s_c;
        for (; img < o.s_hi; img += L) {
            if (img > o.s_lo) {
                OrbitPiece p{OrbitPiece::SaddleCirc, 0, 0, img, 0, d0, ns.k};
                spans.push_back({img - ns.e->delta1, img + ns.e->delta1, img, p});
            }
            if (!periodic) break;
        }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) { return x.anchor < y.anchor; });
    for (std::size_t i = 0; i < spans.size(); ++i) {
        Span& sp = spans[i];
        const double lo_lim = i == 0 ? o.s_lo : spans[i - 1].anchor;
        const double hi_lim = i + 1 == spans.size() ? o.s_hi : spans[i + 1].anchor;
        if (sp.piece.kind == OrbitPiece::SaddleCirc) {
            sp.a = std::max(sp.a, 0.5 * (sp.anchor + lo_lim));
            sp.b = std::min(sp.b, 0.5 * (sp.anchor + hi_lim));
        } else if (sp.piece.side > 0) {
            sp.b = std::min(sp.b, 0.5 * (sp.anchor + hi_lim));
        } else {
            sp.a = std::max(sp.a, 0.5 * (sp.anchor + lo_lim));
        }
    }
    auto fill = [&](double a, double b, bool turn_a, bool turn_b) {
        if (!(b > a)) return;
        if (turn_a && turn_b) {
            const double mid = 0.5 * (a + b);
            o.pieces.push_back({OrbitPiece::TurnLeft, 0, std::sqrt(mid - a), a, 0, 0, -1});
            o.pieces.push_back({OrbitPiece::TurnRight, 0, std::sqrt(b - mid), b, 0, 0, -1});
        } else if (turn_a) {
            o.pieces.push_back({OrbitPiece::TurnLeft, 0, std::sqrt(b - a), a, 0, 0, -1});
        } else if (turn_b) {
            o.pieces.push_back({OrbitPiece::TurnRight, 0, std::sqrt(b - a), b, 0, 0, -1});
        } else {
            o.pieces.push_back({OrbitPiece::Plain, a, b, 0, 0, 0, -1});
        }
    };
    double cursor = o.s_lo;
    bool cursor_turn = o.oscillating && left.regular;
    for (Span& sp : spans) {
        fill(cursor, sp.a, cursor_turn, false);
        OrbitPiece p = sp.piece;
        if (p.kind == OrbitPiece::SaddleCirc) {
            p.lo = -std::asinh((p.s_ref - sp.a) / p.delta);
            p.hi = std::asinh((sp.b - p.s_ref) / p.delta);
        } else {
            const double reach = p.side > 0 ? sp.b - p.s_ref : p.s_ref - sp.a;
            p.lo = 0;
            p.hi = acosh_big(reach / p.delta);
        }
        o.pieces.push_back(p);
        cursor = sp.b;
        cursor_turn = false;
    }
    fill(cursor, o.s_hi, cursor_turn, o.oscillating && right.regular);
    return o;
}

OrbitData ActionModel::orbit_data(const LeafChart& c, const Level& lv, bool with_action) const
{
    const Orbit o = build_orbit(c, lv);
    const Effective& eff = effective();
    const double p = c.p_sign * lv.m;
    OrbitData d;
    if (with_action) {
        const auto r = orbit_integral<3>(o, [&](double s, double Q) {
            const double a = eff.profile(s);
            return std::array<double, 3>{1.0, p / (a * a), Q};
        });
        d.T = r[0];
        d.dtheta = r[1];
        d.J = r[2];
    } else {
        const auto r = orbit_integral<2>(o, [&](double s, double) {
            const double a = eff.profile(s);
            return std::array<double, 2>{1.0, p / (a * a)};
        });
        d.T = r[0];
        d.dtheta = r[1];
    }
    return d;
}

Frequencies ActionModel::frequencies(const LeafChart& c, const Level& lv) const
{
    Frequencies f;
    if (c.regime == Regime::Flat) {
        const double r = flat_radius();
        f.nu1 = r * std::cos(lv.m);
        f.nu2 = r * std::sin(lv.m);
        return f;
    }
    const OrbitData d = orbit_data(c, lv);
    f.T = d.T;
    f.dtheta = d.dtheta;
    f.nu1 = d.dtheta / (kAngleUnit * d.T);
    f.nu2 = 1 / d.T;
    return f;
}

Frequencies ActionModel::frequencies(const LeafChart& c, double sigma) const
{
    return frequencies(c, level_of_sigma(c, sigma));
}

double ActionModel::action_p2(const LeafChart& c, const Level& lv) const
{
    if (c.regime == Regime::Flat) return flat_radius() * std::sin(lv.m);
    return orbit_data(c, lv, true).J / kAngleUnit;
}

double ActionModel::action_p2(const LeafChart& c, double sigma) const { return action_p2(c, level_of_sigma(c, sigma)); }

std::array<double, 2> ActionModel::actions(const LeafChart& c, double sigma) const
{
    if (c.regime == Regime::Flat) {
        const double r = flat_radius();
        return {r * std::cos(sigma), r * std::sin(sigma)};
    }
    return {sigma, action_p2(c, sigma)};
}

Frequencies ActionModel::frequencies_route2(const LeafChart& c, double sigma) const
{
    if (c.regime == Regime::Flat) return frequencies(c, sigma);
    const double width = c.sigma_hi() - c.sigma_lo();
    const double hs = 1e-3 * std::min(width, 4 * std::min(sigma - c.sigma_lo(), c.sigma_hi() - sigma));
    auto p2s = [&](double sg) { return action_p2(c, sg); };
    const double dp_dsigma =
        (-p2s(sigma + 2 * hs) + 8 * p2s(sigma + hs) - 8 * p2s(sigma - hs) + p2s(sigma - 2 * hs)) / (12 * hs);
    const double m = std::fabs(sigma) / kAngleUnit;
    auto p2e = [&](double E) {
        HamiltonianModel H = H_;
        H.E = E;
        ActionModel other(H, surface_, opt_);
        for (const LeafChart& oc : other.charts()) {
            if (oc.regime != c.regime || oc.p_sign != c.p_sign || oc.ps_sign != c.ps_sign) continue;
            if (!(m > oc.lo && m < oc.hi)) continue;
            if (c.regime == Regime::Oscillating && oc.maxima != c.maxima) continue;
            return other.action_p2(oc, other.level(m));
        }
        throw Error(ErrorCode::RouteMismatch, "no matching chart after an energy shift");
    };
    const double hE = 1e-3 * std::min(H_.E, 1.0) * std::min(1.0, (std::min(m - c.lo, c.hi - m)) / std::max(c.hi, 1e-300));
    const double hE2 = std::max(hE, 1e-7 * std::fabs(H_.E));
    const double dp_dE = (-p2e(H_.E + 2 * hE2) + 8 * p2e(H_.E + hE2) - 8 * p2e(H_.E - hE2) + p2e(H_.E - 2 * hE2)) / (12 * hE2);
    Frequencies f;
    f.nu1 = -dp_dsigma / dp_dE;
    f.nu2 = 1 / (kAngleUnit * dp_dE);
    f.T = kAngleUnit * dp_dE;
    f.dtheta = -kAngleUnit * kAngleUnit * dp_dsigma;
    return f;
}

double ActionModel::density(const LeafChart& c, const Level& lv, const std::array<double, 2>& w) const
{
    if (c.regime == Regime::Flat) return std::hypot(w[0], w[1]);
    const OrbitData d = orbit_data(c, lv);
    const Orbit o = build_orbit(c, lv);
    const Effective& eff = effective();
    const double p = c.p_sign * lv.m;
    const auto r = orbit_integral<1>(o, [&](double s, double Q) {
        const double a = eff.profile(s);
        const double X = kAngleUnit * w[0] + w[1] * (d.T * p / (a * a) - d.dtheta);
        const double Y2 = w[1] * w[1] * d.T * d.T * Q;
        return std::array<double, 1>{std::sqrt(a * a * X * X + Y2)};
    });
    return r[0] / d.T;
}

std::array<double, 2> ActionModel::dnu_dsigma(const LeafChart& c, double sigma) const
{
    const double lo = c.sigma_lo(), hi = c.sigma_hi();
    double h = 1e-3 * (hi - lo);
    if (c.regime != Regime::Flat) h = std::min(h, 0.2 * std::min(sigma - lo, hi - sigma));
    auto nu = [&](double sg) {
        const Frequencies f = frequencies(c, sg);
        return std::array<double, 2>{f.nu1, f.nu2};
    };
    auto central = [&](double hh) {
        const auto a = nu(sigma + hh), b = nu(sigma - hh);
        return std::array<double, 2>{(a[0] - b[0]) / (2 * hh), (a[1] - b[1]) / (2 * hh)};
    };
    const auto d1 = central(h), d2 = central(0.5 * h);
    return {(4 * d2[0] - d1[0]) / 3, (4 * d2[1] - d1[1]) / 3};
}

double ActionModel::density_dsigma(const LeafChart& c, double sigma) const
{
    return density(c, level_of_sigma(c, sigma), dnu_dsigma(c, sigma));
}

double ActionModel::density_grid(const LeafChart& c, double sigma, const std::array<double, 2>& w, int n_theta,
                                 const IntegratorConfig& cfg) const
{
    if (n_theta < 1) throw Error(ErrorCode::Precondition, "n_theta must be positive");
    if (c.regime == Regime::Flat) return std::hypot(w[0], w[1]);
    const Level lv = level_of_sigma(c, sigma);
    const OrbitData d = orbit_data(c, lv);
    const Effective& eff = effective();
    const double p = c.p_sign * lv.m;
    const double a0 = eff.profile(c.s_rep);
    const double q0 = (eff.P2(c.s_rep) - lv.m * lv.m) / (a0 * a0);
    PhaseState st;
    st.point = {0.0, c.s_rep, p, (c.regime == Regime::Circulating ? c.ps_sign : 1) * std::sqrt(q0)};
    double acc = 0, t = 0;
    for (int j = 0; j < n_theta; ++j) {
        const double tj = d.T * j / n_theta;
        if (tj > t) st = advance(H_, surface_, st, t, tj, cfg);
        t = tj;
        const double a = eff.profile(st.point.s);
        const double X = kAngleUnit * w[0] + w[1] * (d.T * p / (a * a) - d.dtheta);
        const double Y = w[1] * d.T * st.point.p_s;
        acc += std::sqrt(a * a * X * X + Y * Y);
    }
    return acc / n_theta;
}

CotangentPoint ActionModel::torus_chart(const LeafChart& c, double sigma, double theta1, double theta2,
                                        const IntegratorConfig& cfg) const
{
    if (c.regime == Regime::Flat) {
        const double r = flat_radius();
        return reduce(surface_, CotangentPoint{theta1, theta2, r * std::cos(sigma), r * std::sin(sigma)});
    }
    const Level lv = level_of_sigma(c, sigma);
    const OrbitData d = orbit_data(c, lv);
    const Effective& eff = effective();
    const double p = c.p_sign * lv.m;
    const double a0 = eff.profile(c.s_rep);
    const double q0 = (eff.P2(c.s_rep) - lv.m * lv.m) / (a0 * a0);
    PhaseState st;
    st.point = {0.0, c.s_rep, p, (c.regime == Regime::Circulating ? c.ps_sign : 1) * std::sqrt(q0)};
    const double frac = theta2 - std::floor(theta2);
    if (frac > 0) st = advance(H_, surface_, st, 0, frac * d.T, cfg);
    CotangentPoint out = st.point;
    out.theta = kAngleUnit * theta1 + out.theta - frac * d.dtheta;
    return reduce(surface_, out);
}

int ActionModel::count_NA(const LeafChart& c, const Level& lv, const SurfacePoint& A) const
{
    if (c.regime == Regime::Flat) return 1;
    const Effective& eff = effective();
    const double pA = surface_.near_pole(A.s) ? 0.0 : eff.P(A.s);
    if (std::fabs(lv.m - pA) <= 1e-12 * (1 + pA))
        throw Error(ErrorCode::BoundaryAmbiguity, "leaf lies on the boundary |p| = P(A)");
    if (lv.m > pA) return 0;
    if (c.regime == Regime::Circulating) return 1;
    const Orbit o = build_orbit(c, lv);
    if (eff.periodic()) {
        const double L = eff.period();
        double d = A.s - o.s_lo;
        d -= L * std::floor(d / L);
        return d <= o.s_hi - o.s_lo ? 2 : 0;
    }
    return (A.s >= o.s_lo && A.s <= o.s_hi) ? 2 : 0;
}

int ActionModel::count_NA(const LeafChart& c, double sigma, const SurfacePoint& A) const
{
    return count_NA(c, level_of_sigma(c, sigma), A);
}

int ActionModel::chart_of(const SurfacePoint& A, double p_theta, double p_s) const
{
    if (flat_) return 0;
    const double m = std::fabs(p_theta);
    const int ps = p_theta >= 0 ? 1 : -1;
    for (const LeafChart& c : charts_) {
        if (c.p_sign != ps || !(m > c.lo && m < c.hi)) continue;
        if (c.regime == Regime::Circulating) {
            if (c.ps_sign == (p_s >= 0 ? 1 : -1)) return c.id;
            continue;
        }
        if (count_NA(c, level(m), A) > 0) return c.id;
    }
    return -1;
}

}  // namespace fw
