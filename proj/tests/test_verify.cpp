#include <cmath>
#include <numbers>

#include "assumptions.hpp"
#include "doctest.h"
#include "error.hpp"
#include "lambda.hpp"
#include "verify.hpp"

using namespace fw;
constexpr double kPi = std::numbers::pi;

namespace {
SurfaceModel ring_torus() { return SurfaceModel::revolution_torus(2 * kPi, {2.0, 1.0}, {}); }

ErgodicProblem demo_problem()
{
    ErgodicProblem p;
    p.modes = {{0, 0, {0.5, 0.2}, {}},
               {1, 0, {1.0}, {}},
               {0, 1, {0.3, 0.4}, {0.1}},
               {1, 1, {}, {0.7}},
               {2, -1, {0.2, 0.0, 0.5}, {}}};
    return p;
}
}  // namespace

TEST_CASE("flat torus growth rate is 2 pi")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), SurfaceModel::flat_torus());
    const auto rep = compute_lambda(model, {0.3, 0.2});
    CHECK(rep.lambda == doctest::Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("ring torus growth rate: chart sum, reparametrization, rotation")
{
    const ActionModel model(HamiltonianModel::geodesic(0.5), ring_torus());
    const auto rep = compute_lambda(model, {0.0, kPi / 2});
    double sum = 0;
    for (const auto& c : rep.charts) sum += c.value;
    CHECK(std::fabs(sum - rep.lambda) <= 1e-12 * rep.lambda);
    LambdaOptions re;
    re.reparametrize = true;
    CHECK(compute_lambda(model, {0.0, kPi / 2}, re).lambda == doctest::Approx(rep.lambda).epsilon(1e-6));
    CHECK(compute_lambda(model, {1.7, kPi / 2}).lambda == doctest::Approx(rep.lambda).epsilon(1e-9));
    for (const auto& tail : rep.tails) {
        REQUIRE(tail.estimates.size() >= 2);
        CHECK(std::fabs(tail.estimates.back()) < 1e-4 * rep.lambda);
    }
}

TEST_CASE("A2 fails on the round sphere and holds on the ring torus")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const ActionModel sphere(H, SurfaceModel::revolution_sphere(kPi, {1.0}));
    const auto bad = check_A2(sphere);
    CHECK_FALSE(bad.ok);
    CHECK(bad.failures.size() == bad.samples.size());
    const ActionModel torus(H, ring_torus());
    CHECK(check_A2(torus).ok);
}

TEST_CASE("separatrix directions in the fiber match a dense scan")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const auto surface = ring_torus();
    const ActionModel model(H, surface);
    const SurfacePoint A{0.0, kPi / 2};
    const auto rep = check_A3_A4(model, A);
    CHECK(rep.a3);
    CHECK(rep.a4);
    // hyperbolic leaf: |p_theta| equal to its value on the inner equator
    double P_hyp = 0;
    for (const auto& leaf : model.singular_leaves())
        if (leaf.hyperbolic) P_hyp = leaf.P;
    REQUIRE(P_hyp > 0);
    const FiberMap fiber(H, surface, A);
    int crossings = 0;
    const int n = 200000;
    double prev = std::fabs(fiber(0.0).p_theta) - P_hyp;
    for (int i = 1; i <= n; ++i) {
        const double cur = std::fabs(fiber(2 * kPi * i / n).p_theta) - P_hyp;
        if ((prev < 0) != (cur < 0)) ++crossings;
        prev = cur;
    }
    CHECK(crossings == 4);
    CHECK(rep.z_hits.size() == 4);
}

TEST_CASE("pole source points are rejected by the theorem check")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const auto sphere = SurfaceModel::revolution_sphere(kPi, {1.0});
    CHECK_THROWS_AS(verify_theorem(H, sphere, {0.0, 0.0}), Error);
    const auto rep = verify_periodic_pole(H, sphere, {0.0, 0.0});
    CHECK(rep.period == doctest::Approx(2 * kPi));
    CHECK(rep.pass);
}

TEST_CASE("stationary phase: quadratic phase and a degenerate cubic")
{
    OscillatoryProblem quad;
    quad.phase_poly = {0.0, 0.0, 0.5};
    const auto crit = phase_critical_points(quad);
    REQUIRE(crit.size() == 1);
    CHECK(crit[0].x == doctest::Approx(0.0));
    CHECK(crit[0].S2 == doctest::Approx(1.0));
    // the bump has amplitude 1 at the critical point: leading term sqrt(2 pi / t) e^{i pi/4}
    const auto lead = statphase_leading(quad, 100.0);
    CHECK(std::abs(lead) == doctest::Approx(std::sqrt(2 * kPi / 100)));
    const auto rep = statphase_decay_rate(quad, {1e2, 1e3, 1e4});
    CHECK(rep.slope <= -1.3);
    CHECK(rep.pass);

    OscillatoryProblem cubic;
    cubic.phase_poly = {0.0, 0.0, 0.0, 1.0 / 3};
    CHECK_THROWS_AS(statphase_leading(cubic, 100.0), Error);
    const auto deg = statphase_decay_rate(cubic, {1e2, 1e3, 1e4});
    CHECK(deg.degenerate);
    CHECK(deg.slope < 0);
}

TEST_CASE("ergodic limit matches a dense grid average")
{
    const auto p = demo_problem();
    // midpoint rule in both angles is exact for these modes; Simpson in s with 400 panels
    const int ng = 16, ns = 400;
    double oracle = 0;
    for (int i = 0; i <= ns; ++i) {
        const double s = p.s0 + (p.s1 - p.s0) * i / ns;
        double avg = 0;
        for (int j = 0; j < ng; ++j)
            for (int k = 0; k < ng; ++k) avg += p.F(s, (j + 0.5) / ng, (k + 0.5) / ng);
        avg /= ng * ng;
        const double w = (i == 0 || i == ns) ? 1 : (i % 2 ? 4 : 2);
        oracle += w * avg;
    }
    oracle *= (p.s1 - p.s0) / (3.0 * ns);
    CHECK(std::fabs(ergodic_rhs(p) - oracle) < 1e-6);
    CHECK(ergodic_hypothesis(p));
    const auto rep = ergodic_convergence(p, {250, 500, 1000});
    CHECK(rep.pass);
}

TEST_CASE("ergodic hypothesis fails for a straight line of frequencies")
{
    auto p = demo_problem();
    p.v1 = TrigPoly({1.0}, {}, 1.0);
    p.v2 = TrigPoly({2.0}, {}, 1.0);
    std::string detail;
    CHECK_FALSE(ergodic_hypothesis(p, &detail));
    CHECK_FALSE(ergodic_convergence(p, {250, 500, 1000}).pass);
    CHECK_THROWS_AS(ergodic_convergence(p, {250, 500, 1000}, 0.05, true), Error);
}
