#include <cmath>
#include <numbers>

#include "doctest.h"
#include "error.hpp"
#include "front.hpp"

using namespace fw;
constexpr double kPi = std::numbers::pi;

namespace {
SurfaceModel ring_torus() { return SurfaceModel::revolution_torus(2 * kPi, {2.0, 1.0}, {}); }
}  // namespace

TEST_CASE("flat torus front is a circle of length 2 pi t")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const auto torus = SurfaceModel::flat_torus();
    Front f(H, torus, {0.3, 0.2});
    CHECK(f.length() == doctest::Approx(0.0));
    for (double t : {0.5, 3.0, 17.0, 60.0}) {
        f.evolve(t);
        CHECK(std::fabs(f.length() - 2 * kPi * t) <= 1e-9 * 2 * kPi * t);
    }
    // chords only make sense while neighbours are closer than half a period
    Front g(H, torus, {0.3, 0.2});
    g.evolve(3.0);
    CHECK(g.polyline_length() == doctest::Approx(2 * kPi * 3).epsilon(1e-3));
}

TEST_CASE("front at t = 0 has zero length")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    Front f(H, ring_torus(), {0.0, kPi / 2});
    f.evolve(0.0);
    CHECK(f.length() == doctest::Approx(0.0));
}

TEST_CASE("pole front on the round sphere")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const auto sphere = SurfaceModel::revolution_sphere(kPi, {1.0});
    Front f(H, sphere, {0.0, 0.0});
    CHECK(f.pole_start());
    for (double t : {0.3, 1.5, 2.9, 4.0, 7.7}) {
        f.evolve(t);
        CHECK(std::fabs(f.length() - 2 * kPi * std::fabs(std::sin(t))) < 1e-8);
    }
}

TEST_CASE("masks: everything, nothing, and a set plus its complement")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    Front f(H, ring_torus(), {0.0, kPi / 2});
    f.evolve(12.0);
    const double full = f.length();
    const Mask all{-1e9, 1e9, -1e9, 1e9};
    const Mask none{-1e9, 1e9, -1e9, 1e9, true};
    CHECK(std::fabs(f.length(all) - full) <= 1e-12 * full);
    CHECK(f.length(none) == 0.0);
    Mask box{0, kPi, 0, kPi};
    Mask rest = box;
    rest.complement = true;
    const double in = f.length(box), out = f.length(rest);
    CHECK(in > 0);
    CHECK(out > 0);
    CHECK(std::fabs(in + out - full) <= 1e-12 * full);
}

TEST_CASE("ring torus length is stable under doubling the initial sampling")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    FrontOptions coarse, fine;
    fine.n0 = 2 * coarse.n0;
    Front a(H, ring_torus(), {0.0, kPi / 2}, coarse);
    Front b(H, ring_torus(), {0.0, kPi / 2}, fine);
    a.evolve(25.0);
    b.evolve(25.0);
    CHECK(a.length() == doctest::Approx(b.length()).epsilon(2e-3));
    CHECK(a.refined() > 0);
    CHECK(a.window_count() > 0);
}

TEST_CASE("rotating the source point in theta leaves the length unchanged")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    Front a(H, ring_torus(), {0.0, 1.0});
    Front b(H, ring_torus(), {2.3, 1.0});
    a.evolve(15.0);
    b.evolve(15.0);
    CHECK(a.length() == doctest::Approx(b.length()).epsilon(1e-8));
}

TEST_CASE("tangent length and chord sum agree once refined")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    Front f(H, ring_torus(), {0.0, 1.0});
    f.evolve(10.0);
    CHECK(f.polyline_length() == doctest::Approx(f.length()).epsilon(1e-2));
    double sum = 0;
    for (const auto& [name, len] : f.segment_lengths()) sum += len;
    CHECK(sum == doctest::Approx(f.length()).epsilon(1e-12));
}

TEST_CASE("without refinement the separatrix directions exhaust the budget")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    FrontOptions opt;
    opt.windows = false;
    opt.max_samples = 4000;
    Front f(H, ring_torus(), {0.0, kPi / 2}, opt);
    CHECK_THROWS_AS(f.evolve(60.0), Error);
}

TEST_CASE("length series and slope estimate")
{
    const auto H = HamiltonianModel::geodesic(0.5);
    const auto times = log_spaced_times(1, 40, 16);
    REQUIRE(times.size() == 16);
    CHECK(times.front() == doctest::Approx(1.0));
    CHECK(times.back() == doctest::Approx(40.0));
    const auto rows = length_series(H, SurfaceModel::flat_torus(), {0.0, 0.0}, times);
    const auto est = slope_estimate(rows, 0.5);
    CHECK(est.slope == doctest::Approx(2 * kPi).epsilon(1e-9));
    CHECK(est.n_used == 8);
    std::vector<SeriesRow> few(rows.begin(), rows.begin() + 10);
    CHECK_THROWS_AS(slope_estimate(few, 0.5), Error);
}
