#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dop853.hpp"
#include "dual.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "trigpoly.hpp"

using namespace fw;

TEST_CASE("trig series evaluation, derivatives and products")
{
    TrigPoly f({0.3, 1.0, -0.25}, {0.5, 0.0, 0.125}, 0.7);
    TrigPoly g({2.0, 0.0, 0.5}, {-1.0}, 0.7);
    for (double s : {-1.3, 0.0, 0.4, 2.9, 11.0}) {
        const double direct = 0.3 + std::cos(0.7 * s) - 0.25 * std::cos(1.4 * s) + 0.5 * std::sin(0.7 * s) +
                              0.125 * std::sin(2.1 * s);
        CHECK(f(s) == doctest::Approx(direct).epsilon(1e-14));
        CHECK(TrigPoly::product(f, g)(s) == doctest::Approx(f(s) * g(s)).epsilon(1e-13));
        const double h = 1e-4;
        const double fd = (f(s + h) - f(s - h)) / (2 * h);
        CHECK(f.derivative(s, 1) == doctest::Approx(fd).epsilon(1e-7));
        const double fd2 = (f(s + h) - 2 * f(s) + f(s - h)) / (h * h);
        CHECK(f.derivative(s, 2) == doctest::Approx(fd2).epsilon(1e-5));
        double v, d1, d2;
        f.eval2(s, v, d1, d2);
        CHECK(d1 == doctest::Approx(f.derivative(s, 1)).epsilon(1e-14));
        CHECK(d2 == doctest::Approx(f.derivative(s, 2)).epsilon(1e-14));
        CHECK(f.difference(s, s - 0.3) == doctest::Approx(f(s) - f(s - 0.3)).epsilon(1e-13));
        const auto t = f.taylor(s, 30);
        CHECK(series_eval(t, 0.2) == doctest::Approx(f(s + 0.2)).epsilon(1e-14));
    }
    // tiny separations keep full relative accuracy
    const double s = 0.9, d = (s + 1e-12) - s;
    const double slope = f.derivative(s, 1);
    CHECK(f.difference(s + d, s) / d == doctest::Approx(slope).epsilon(1e-9));
}

TEST_CASE("dual numbers carry exact first derivatives")
{
    const Dual x(0.7, 1.0);
    const Dual y = exp(sin(x)) * sqrt(x + 2.0) / cosh(x);
    const double h = 1e-6;
    auto f = [](double z) { return std::exp(std::sin(z)) * std::sqrt(z + 2.0) / std::cosh(z); };
    CHECK(y.v == doctest::Approx(f(0.7)));
    CHECK(y.d == doctest::Approx((f(0.7 + h) - f(0.7 - h)) / (2 * h)).epsilon(1e-8));
    const Dual big(1e200, 3.0);
    CHECK(acosh_big(big).v == doctest::Approx(std::log(2e200)).epsilon(1e-15));
    CHECK(acosh_big(big).d == doctest::Approx(3.0 / 1e200).epsilon(1e-12));
    CHECK(asinh_big(big).d == doctest::Approx(3.0 / 1e200).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature")
{
    CHECK(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, 1e-14, 1e-13) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sqrt(x); }, 0, 1, 1e-13, 1e-12) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    auto r = integrate_vec<2>([](double x) { return std::array<double, 2>{x * x, std::exp(x)}; }, 0, 2, 1e-14, 1e-13);
    CHECK(r.value[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(r.value[1] == doctest::Approx(std::exp(2.0) - 1).epsilon(1e-13));
    CHECK(gauss_legendre20([](double x) { return std::pow(x, 39); }, 0, 1) == doctest::Approx(1.0 / 40).epsilon(1e-13));
}

TEST_CASE("DOP853 on the harmonic oscillator")
{
    auto f = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    double errs[2];
    int idx = 0;
    for (double tol : {1e-7, 1e-11}) {
        IntegratorConfig cfg;
        cfg.rel_tol = tol;
        cfg.abs_tol = tol;
        cfg.max_step = 10;
        Dop853<double, 2> ode;
        std::array<double, 2> y = {1.0, 0.0};
        double t = 0, h = 0;
        ode.run(f, t, y, 20.0, h, cfg);
        CHECK(t == 20.0);
        errs[idx++] = std::hypot(y[0] - std::cos(20.0), y[1] + std::sin(20.0));
    }
    CHECK(errs[1] < 1e-9);
    CHECK(errs[1] < errs[0]);

    // stop predicate halts after the first accepted step past the event
    IntegratorConfig cfg;
    Dop853<double, 2> ode;
    std::array<double, 2> y = {1.0, 0.0};
    double t = 0, h = 0;
    const bool stopped = ode.run(f, t, y, 20.0, h, cfg, [](double, const std::array<double, 2>& z) { return z[0] < 0; });
    CHECK(stopped);
    CHECK(t > std::numbers::pi / 2);
    CHECK(t < 3.0);
}

TEST_CASE("DOP853 propagates dual tangents")
{
    // y' = -k y with k = 1 + eps; derivative with respect to eps at 0 is -t e^{-t}
    auto f = [](double, const std::array<Dual, 1>& y, std::array<Dual, 1>& dy) { dy[0] = -(Dual(1.0, 1.0)) * y[0]; };
    Dop853<Dual, 1> ode;
    std::array<Dual, 1> y = {Dual(1.0, 0.0)};
    double t = 0, h = 0;
    IntegratorConfig cfg;
    ode.run(f, t, y, 3.0, h, cfg);
    CHECK(y[0].v == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
    CHECK(y[0].d == doctest::Approx(-3.0 * std::exp(-3.0)).epsilon(1e-9));
}

TEST_CASE("parallel loop output is independent of worker count")
{
    std::vector<double> a(1000), b(1000);
    set_threads(1);
    parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(i * 0.1) * std::exp(-0.001 * i); });
    set_threads(4);
    parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(i * 0.1) * std::exp(-0.001 * i); });
    set_threads(default_threads());
    CHECK(a == b);
    CompensatedSum s;
    for (int i = 0; i < 10; ++i) s.add(0.1);
    s.add(1e16);
    s.add(-1e16);
    CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-15));
}
