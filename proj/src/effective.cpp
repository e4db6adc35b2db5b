#include "effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace fw {

namespace {
constexpr int kTaylorDegree = 32;

template <class F>
double bisect(F&& f, double a, double b)
{
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b)) break;
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

void SaddleExpansion::set_reach()
{
    reach.assign(r.size(), 0.0);
    const double target = 1e-17 * std::fabs(r[0]);
    for (std::size_t n = 0; n < r.size(); ++n) {
        auto tail = [&](double d) {
            double acc = 0;
            for (std::size_t k = n + 1; k < r.size(); ++k) acc += (k + 1.0) * std::fabs(r[k]) * std::pow(d, (double)k);
            return acc;
        };
        if (tail(delta1) <= target) {
            reach[n] = delta1;
            continue;
        }
        double lo = -700, hi = std::log(delta1);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (tail(std::exp(mid)) <= target ? lo : hi) = mid;
        }
        reach[n] = std::exp(lo);
    }
    reach.back() = std::numeric_limits<double>::infinity();
}

double SaddleExpansion::solve_turning(double rhs, int side) const
{
    double d = std::sqrt(rhs / r[0]);
    for (int it = 0; it < 100; ++it) {
        const double z = side * d;
        const double F = d * d * R(z) - rhs;
        const double dF = 2 * d * R(z) + d * d * side * R1(z);
        const double step = F / dF;
        d -= step;
        if (std::fabs(step) <= 1e-16 * d) break;
    }
    return d;
}

Effective::Effective(const HamiltonianModel& H, const SurfaceModel& surface)
    : a_(surface.a), L_(surface.L), periodic_(surface.s_periodic())
{
    if (!surface.is_revolution()) throw Error(ErrorCode::Precondition, "Clairaut reduction needs a surface of revolution");
    const TrigPoly a2 = TrigPoly::product(surface.a, surface.a);
    TrigPoly kin;
    if (H.kind == HamiltonianKind::Geodesic)
        kin = TrigPoly({2 * H.E}, {}, surface.a.freq());
    else
        kin = H.V.affine(-2.0, 2 * H.E);
    P2_ = TrigPoly::product(a2, kin);
    classify();
}

double Effective::P(double s) const { return std::sqrt(std::max(0.0, P2_(s))); }

const SaddleExpansion& Effective::expansion(int i) const
{
    if (i < 0 || i >= (int)saddles_.size() || saddles_[i].r.empty())
        throw Error(ErrorCode::Precondition, "no saddle expansion for critical point " + std::to_string(i));
    return saddles_[i];
}

void Effective::classify()
{
    const int K = std::max(1, P2_.harmonics());
    const int N = std::max(4096, 256 * K);
    const double w = P2_.freq();
    std::vector<double> s(N + 1), g(N + 1), v(N + 1);
    double vmax = 0, gmax = 0;
    for (int i = 0; i <= N; ++i) {
        s[i] = L_ * i / N;
        double d[2];
        P2_.derivatives(s[i], 1, d);
        v[i] = d[0];
        g[i] = d[1];
        vmax = std::max(vmax, std::fabs(d[0]));
        gmax = std::max(gmax, std::fabs(d[1]));
    }
    p2_scale_ = vmax;
    const double dd_tol = 1e-7 * vmax * w * w;
    auto deriv1 = [&](double x) { return P2_.derivative(x, 1); };
    auto push = [&](double x) {
        if (periodic_) x -= L_ * std::floor(x / L_);
        if (!(P2_(x) > 0)) return;
        if (!periodic_ && (x <= 1e-9 * L_ || x >= L_ * (1 - 1e-9))) return;
        for (const auto& c : crit_) {
            double dx = std::fabs(c.s - x);
            if (periodic_) dx = std::min(dx, L_ - dx);
            if (dx < 1e-9 * L_) return;
        }
        double d[3];
        P2_.derivatives(x, 2, d);
        if (std::fabs(d[2]) <= dd_tol)
            throw Error(ErrorCode::MorseViolation, "degenerate critical point of the Clairaut function at s=" + std::to_string(x));
        crit_.push_back({x, std::sqrt(d[0]), d[2], d[2] > 0});
    };
    for (int i = 0; i < N; ++i) {
        if (g[i] == 0) {
            push(s[i]);
            continue;
        }
        if ((g[i] < 0) != (g[i + 1] < 0) && g[i + 1] != 0) push(bisect(deriv1, s[i], s[i + 1]));
    }
    // zeros of the derivative without a sign change
    for (int i = 1; i < N; ++i) {
        if (!(v[i] > 0)) continue;
        const double ag = std::fabs(g[i]);
        if (ag <= std::fabs(g[i - 1]) && ag <= std::fabs(g[i + 1]) && (g[i - 1] < 0) == (g[i] < 0) &&
            (g[i + 1] < 0) == (g[i] < 0)) {
            double lo = s[i - 1], hi = s[i + 1];
            const double phi = 0.5 * (std::sqrt(5.0) - 1);
            for (int it = 0; it < 100; ++it) {
                const double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
                if (std::fabs(deriv1(x1)) < std::fabs(deriv1(x2)))
                    hi = x2;
                else
                    lo = x1;
            }
            const double x = 0.5 * (lo + hi);
            if (std::fabs(deriv1(x)) <= 1e-8 * gmax)
                throw Error(ErrorCode::MorseViolation, "degenerate critical point of the Clairaut function at s=" + std::to_string(x));
        }
    }
    std::sort(crit_.begin(), crit_.end(), [](const CriticalPoint& a, const CriticalPoint& b) { return a.s < b.s; });

    saddles_.assign(crit_.size(), SaddleExpansion{});
    const double base_radius = std::min(0.5, 1.0 / (K * w));
    for (std::size_t i = 0; i < crit_.size(); ++i) {
        if (!crit_[i].hyperbolic) continue;
        SaddleExpansion& e = saddles_[i];
        e.s_c = crit_[i].s;
        e.Pc = crit_[i].P;
        const auto t = P2_.taylor(e.s_c, kTaylorDegree);
        e.r.assign(t.begin() + 2, t.end());
        double radius = base_radius;
        for (std::size_t j = 0; j < crit_.size(); ++j) {
            if (j == i) continue;
            double dx = std::fabs(crit_[j].s - e.s_c);
            if (periodic_) dx = std::min(dx, L_ - dx);
            radius = std::min(radius, 0.45 * dx);
        }
        if (!periodic_) radius = std::min({radius, 0.45 * e.s_c, 0.45 * (L_ - e.s_c)});
        // keep R positive on the near region
        for (int k = 0; k < 60; ++k) {
            bool ok = true;
            for (int j = -64; j <= 64 && ok; ++j) ok = e.R(radius * j / 64.0) > 0.05 * e.r[0];
            if (ok) break;
            radius *= 0.8;
        }
        e.delta1 = radius;
        e.set_reach();
        // Taylor remainder check against the exact difference at the edge
        const double edge = P2_.difference(e.s_c + radius, e.s_c);
        const double model = radius * radius * e.R(radius);
        if (std::fabs(edge - model) > 1e-10 * std::fabs(edge))
            throw Error(ErrorCode::Precondition, "saddle expansion does not converge on its near region");
        e.a_c = a_(e.s_c);
        e.kappa = std::sqrt(e.r[0]) / e.a_c;
    }
}

}  // namespace fw
