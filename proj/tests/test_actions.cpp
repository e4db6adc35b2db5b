#include <cmath>
#include <numbers>

#include "actions.hpp"
#include "doctest.h"
#include "error.hpp"
#include "flow.hpp"

using namespace fw;
constexpr double kPi = std::numbers::pi;

namespace {
SurfaceModel ring_torus() { return SurfaceModel::revolution_torus(2 * kPi, {2.0, 1.0}, {}); }

// period and theta advance by integrating the flow until the orbit returns to s_rep
std::pair<double, double> flow_return(const ActionModel& model, const LeafChart& c, double m)
{
    const auto& eff = model.effective();
    const double a0 = eff.profile(c.s_rep);
    const double q0 = (eff.P2(c.s_rep) - m * m) / (a0 * a0);
    const double ps0 = (c.regime == Regime::Circulating ? c.ps_sign : 1) * std::sqrt(q0);
    FlowSystem sys(model.hamiltonian(), model.surface());
    auto f = [&](double, const Vec4& y, Vec4& dy) { sys.field(y.data(), dy.data()); };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.05;
    const double L = model.surface().L;
    auto crossing = [&](const Vec4& y) {
        if (c.regime == Regime::Circulating) return std::fabs(y[1] - c.s_rep) >= L;
        return y[1] > c.s_rep && y[3] > 0;
    };
    Dop853<double, 4> ode;
    Vec4 y = {0.0, c.s_rep, c.p_sign * m, ps0};
    double t = 0, h = 0;
    bool moved = false;
    // first leave the start, then stop at the first return
    ode.run(f, t, y, 1e6, h, cfg, [&](double, const Vec4& z) {
        if (!moved) {
            moved = c.regime == Regime::Circulating ? std::fabs(z[1] - c.s_rep) > 0.1 : z[3] < 0;
            return false;
        }
        return crossing(z);
    });
    // bisect the crossing time using dense restarts from the start point
    double lo = t - h - 1.0, hi = t;
    auto state_at = [&](double tt) {
        Vec4 z = {0.0, c.s_rep, c.p_sign * m, ps0};
        double t0 = 0, hh = 0;
        Dop853<double, 4> o2;
        o2.run(f, t0, z, tt, hh, cfg);
        return z;
    };
    auto g = [&](double tt) {
        const Vec4 z = state_at(tt);
        if (c.regime == Regime::Circulating) return std::fabs(z[1] - c.s_rep) - L;
        return z[1] - c.s_rep;
    };
    lo = std::max(lo, 0.5 * t);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0) lo = mid;
        else hi = mid;
    }
    const Vec4 z = state_at(hi);
    return {hi, z[0]};
}
}  // namespace

TEST_CASE("round sphere: two oscillating charts with constant frequencies")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), SurfaceModel::revolution_sphere(kPi, {1.0}));
    REQUIRE(model.charts().size() == 2);
    for (const auto& c : model.charts()) {
        CHECK(c.regime == Regime::Oscillating);
        CHECK(c.lo_tag == EndTag::Seam);
        CHECK(c.hi_tag == EndTag::Elliptic);
        for (double m : {1e-3, 0.3, 0.9, 0.999}) {
            const double sigma = c.p_sign * 2 * kPi * m;
            const auto f = model.frequencies(c, sigma);
            CHECK(f.T == doctest::Approx(2 * kPi).epsilon(1e-11));
            CHECK(f.nu1 == doctest::Approx(c.p_sign / (2 * kPi)).epsilon(1e-11));
            // the action of a great circle is 1 - |p_theta|
            CHECK(model.action_p2(c, sigma) == doctest::Approx(1 - m).epsilon(1e-11));
        }
    }
}

TEST_CASE("ring torus charts")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    REQUIRE(model.charts().size() == 6);
    int circ = 0, osc = 0;
    for (const auto& c : model.charts()) {
        if (c.regime == Regime::Circulating) {
            ++circ;
            CHECK(c.lo == 0.0);
            CHECK(c.hi == doctest::Approx(1.0));
            CHECK(c.hi_tag == EndTag::Hyperbolic);
        } else {
            ++osc;
            CHECK(c.lo == doctest::Approx(1.0));
            CHECK(c.hi == doctest::Approx(3.0));
            CHECK(c.lo_tag == EndTag::Hyperbolic);
            CHECK(c.hi_tag == EndTag::Elliptic);
        }
    }
    CHECK(circ == 4);
    CHECK(osc == 2);
}

TEST_CASE("orbit quadrature agrees with direct flow integration")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    for (const auto& c : model.charts()) {
        if (c.p_sign < 0 || c.ps_sign < 0) continue;
        const double mid = c.regime == Regime::Circulating ? 0.5 : 2.0;
        const double close = c.regime == Regime::Circulating ? 1 - 1e-3 : 1 + 1e-3;
        for (double m : {mid, close}) {
            const auto f = model.frequencies(c, 2 * kPi * m);
            const auto [T, dth] = flow_return(model, c, m);
            CHECK(f.T == doctest::Approx(T).epsilon(1e-8));
            CHECK(f.dtheta == doctest::Approx(dth).epsilon(1e-8));
        }
    }
}

TEST_CASE("period grows logarithmically at the hyperbolic ends")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    const int k = 1;  // inner equator
    REQUIRE(model.critical_points()[k].hyperbolic);
    for (const auto& c : model.charts()) {
        if (c.p_sign < 0 || c.ps_sign < 0) continue;
        const int eps = c.regime == Regime::Circulating ? -1 : 1;
        // oscillating leaves pass the saddle twice per period, circulating ones once
        const double slope = c.regime == Regime::Circulating ? 1.0 : 2.0;
        const double y = 30;
        const double t1 = model.frequencies(c, model.level_near(k, std::exp(-y), eps)).T;
        const double t2 = model.frequencies(c, model.level_near(k, std::exp(-y - 1), eps)).T;
        CHECK(t2 - t1 == doctest::Approx(slope).epsilon(1e-9));
        // continuity between the expanded and the plain treatment
        const double x = 0.999 * model.near_threshold(k);
        Level a = model.level_near(k, x, eps);
        Level b = a;
        b.crit = -1;
        b.x = 0;
        b.eps = 0;
        const double x2 = 1.001 * model.near_threshold(k);
        const double ta = model.frequencies(c, a).T;
        const double tb = model.frequencies(c, model.level_near(k, x2, eps)).T;
        CHECK(ta == doctest::Approx(tb).epsilon(1e-3));
    }
}

TEST_CASE("two routes to the frequencies agree")
{
    const auto torus = SurfaceModel::revolution_torus(2 * kPi, {2.0, 1.0, 0.3}, {0.2});
    const ActionModel model(HamiltonianModel::geodesic(0.5), torus);
    for (const auto& c : model.charts()) {
        const double sigma = 0.5 * (c.sigma_lo() + c.sigma_hi()) + 0.1 * (c.sigma_hi() - c.sigma_lo());
        const auto f1 = model.frequencies(c, sigma);
        const auto f2 = model.frequencies_route2(c, sigma);
        CHECK(f2.nu1 == doctest::Approx(f1.nu1).epsilon(1e-7));
        CHECK(f2.nu2 == doctest::Approx(f1.nu2).epsilon(1e-7));
    }
    const auto sch = HamiltonianModel::schrodinger(1.5, torus, {0.0, 0.3}, {});
    const ActionModel m2(sch, torus);
    for (const auto& c : m2.charts()) {
        const double sigma = 0.5 * (c.sigma_lo() + c.sigma_hi());
        const auto f1 = m2.frequencies(c, sigma);
        const auto f2 = m2.frequencies_route2(c, sigma);
        CHECK(f2.nu1 == doctest::Approx(f1.nu1).epsilon(1e-7));
        CHECK(f2.nu2 == doctest::Approx(f1.nu2).epsilon(1e-7));
    }
}

TEST_CASE("density quadrature matches the torus-chart grid average")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-13;
    for (const auto& c : model.charts()) {
        const double sigma = c.sigma_lo() + 0.37 * (c.sigma_hi() - c.sigma_lo());
        const auto w = model.dnu_dsigma(c, sigma);
        const double q = model.density(c, model.level_of_sigma(c, sigma), w);
        const double g = model.density_grid(c, sigma, w, 512, cfg);
        CHECK(q == doctest::Approx(g).epsilon(1e-6));
    }
}

TEST_CASE("torus chart: theta2 = 1 returns to the start shifted by theta1")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    IntegratorConfig cfg;
    for (const auto& c : model.charts()) {
        const double sigma = c.sigma_lo() + 0.6 * (c.sigma_hi() - c.sigma_lo());
        const auto a = model.torus_chart(c, sigma, 0.25, 0.0, cfg);
        const auto b = model.torus_chart(c, sigma, 0.25, 0.999999, cfg);
        CHECK(std::fabs(std::remainder(a.theta - b.theta, 2 * kPi)) < 1e-4);
        CHECK(std::fabs(std::remainder(a.s - b.s, 2 * kPi)) < 1e-4);
        const auto H = model.hamiltonian();
        CHECK(hamiltonian_value(H, model.surface(), model.torus_chart(c, sigma, 0.1, 0.3, cfg)) ==
              doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("leaf count over a point")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    const SurfacePoint A{0.0, kPi / 2};  // a = 2, P(A) = 2
    for (const auto& c : model.charts()) {
        const double inside = c.p_sign * 2 * kPi * (c.regime == Regime::Circulating ? 0.5 : 1.5);
        CHECK(model.count_NA(c, inside, A) == (c.regime == Regime::Circulating ? 1 : 2));
        if (c.regime == Regime::Oscillating) CHECK(model.count_NA(c, c.p_sign * 2 * kPi * 2.5, A) == 0);
    }
    const auto& c0 = model.charts()[2];
    CHECK_THROWS_AS(model.count_NA(c0, c0.p_sign * 2 * kPi * 2.0, A), Error);
}
