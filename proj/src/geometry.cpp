#include "geometry.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace fw {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kScan = 4096;
}

std::string to_string(SurfaceKind k)
{
    switch (k) {
    case SurfaceKind::RevolutionTorus: return "revolution_torus";
    case SurfaceKind::RevolutionSphere: return "revolution_sphere";
    case SurfaceKind::FlatTorus: return "flat_torus";
    }
    return "?";
}

std::string to_string(HamiltonianKind k) { return k == HamiltonianKind::Geodesic ? "geodesic" : "schrodinger"; }

double SurfaceModel::base_frequency(SurfaceKind kind, double L)
{
    switch (kind) {
    case SurfaceKind::RevolutionTorus: return 2 * kPi / L;
    case SurfaceKind::RevolutionSphere: return kPi / L;
    case SurfaceKind::FlatTorus: return 2 * kPi;
    }
    return 1;
}

SurfaceModel SurfaceModel::flat_torus()
{
    SurfaceModel m;
    m.kind = SurfaceKind::FlatTorus;
    m.L = 1.0;
    m.a = TrigPoly({1.0}, {}, 2 * kPi);
    return m;
}

SurfaceModel SurfaceModel::revolution_torus(double L, std::vector<double> a_cos, std::vector<double> a_sin)
{
    SurfaceModel m;
    m.kind = SurfaceKind::RevolutionTorus;
    m.L = L;
    m.a = TrigPoly(std::move(a_cos), std::move(a_sin), base_frequency(m.kind, L));
    return m;
}

SurfaceModel SurfaceModel::revolution_sphere(double L, std::vector<double> a_sin)
{
    SurfaceModel m;
    m.kind = SurfaceKind::RevolutionSphere;
    m.L = L;
    m.a = TrigPoly({}, std::move(a_sin), base_frequency(m.kind, L));
    return m;
}

double SurfaceModel::theta_period() const { return kind == SurfaceKind::FlatTorus ? 1.0 : 2 * kPi; }

bool SurfaceModel::near_pole(double s) const { return pole_index(s) >= 0; }

int SurfaceModel::pole_index(double s) const
{
    if (kind != SurfaceKind::RevolutionSphere) return -1;
    if (std::fabs(s) <= pole_tolerance()) return 0;
    if (std::fabs(s - L) <= pole_tolerance()) return 1;
    return -1;
}

void SurfaceModel::validate() const
{
    if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorCode::Config, "surface.L must be positive");
    if (kind == SurfaceKind::FlatTorus) return;
    if (kind == SurfaceKind::RevolutionSphere) {
        if (a.has_cos_terms())
            throw Error(ErrorCode::Config, "sphere profile must be a sine series (a_cos must be empty or zero)");
        const double d0 = a.derivative(0.0, 1), dL = a.derivative(L, 1);
        if (std::fabs(d0 - 1) > 1e-9) throw Error(ErrorCode::Config, "sphere profile needs a'(0)=1, got " + std::to_string(d0));
        if (std::fabs(dL + 1) > 1e-9) throw Error(ErrorCode::Config, "sphere profile needs a'(L)=-1, got " + std::to_string(dL));
        for (int i = 1; i < kScan; ++i) {
            const double s = L * i / kScan;
            if (!(a(s) > 0)) throw Error(ErrorCode::Config, "profile a must be positive inside (0,L); fails at s=" + std::to_string(s));
        }
        return;
    }
    for (int i = 0; i < kScan; ++i) {
        const double s = L * i / kScan;
        if (!(a(s) > 0)) throw Error(ErrorCode::Config, "profile a must be positive; fails at s=" + std::to_string(s));
    }
}

HamiltonianModel HamiltonianModel::geodesic(double E)
{
    HamiltonianModel h;
    h.kind = HamiltonianKind::Geodesic;
    h.E = E;
    h.V = TrigPoly();
    return h;
}

HamiltonianModel HamiltonianModel::schrodinger(double E, const SurfaceModel& surface, std::vector<double> v_cos,
                                               std::vector<double> v_sin)
{
    HamiltonianModel h;
    h.kind = HamiltonianKind::Schrodinger;
    h.E = E;
    h.V = TrigPoly(std::move(v_cos), std::move(v_sin), SurfaceModel::base_frequency(surface.kind, surface.L));
    return h;
}

void HamiltonianModel::validate(const SurfaceModel& surface) const
{
    if (!std::isfinite(E)) throw Error(ErrorCode::Config, "hamiltonian.E must be finite");
    if (kind == HamiltonianKind::Geodesic) {
        if (!(E > 0)) throw Error(ErrorCode::Config, "geodesic kind requires E > 0");
        return;
    }
    if (surface.is_sphere() && V.has_sin_terms())
        throw Error(ErrorCode::Config, "sphere potential must be a cosine series (smooth at the poles)");
    const double period = surface.is_sphere() ? surface.L : surface.L;
    bool allowed = false;
    double prev = V(0.0) - E;
    for (int i = 0; i <= kScan; ++i) {
        const double s = period * i / kScan;
        const double g = V(s) - E;
        if (g < 0) allowed = true;
        if (i > 0 && (g < 0) != (prev < 0)) {
            const double d = V.derivative(s, 1);
            if (std::fabs(d) < 1e-9) throw Error(ErrorCode::Config, "dV vanishes on {V=E} near s=" + std::to_string(s));
        }
        prev = g;
    }
    if (!allowed) throw Error(ErrorCode::Config, "classically allowed region {V<E} is empty");
}

std::array<double, 3> metric_coeffs(const SurfaceModel& surface, const SurfacePoint& x)
{
    if (surface.kind == SurfaceKind::FlatTorus) return {1.0, 0.0, 1.0};
    if (surface.near_pole(x.s)) throw Error(ErrorCode::PoleEvaluation, "metric evaluated at a sphere pole");
    const double a = surface.a(x.s);
    return {a * a, 0.0, 1.0};
}

double hamiltonian_value(const HamiltonianModel& H, const SurfaceModel& surface, const CotangentPoint& pt)
{
    if (surface.near_pole(pt.s)) throw Error(ErrorCode::PoleEvaluation, "Hamiltonian evaluated at a sphere pole");
    const double a = surface.kind == SurfaceKind::FlatTorus ? 1.0 : surface.a(pt.s);
    return 0.5 * (pt.p_theta * pt.p_theta / (a * a) + pt.p_s * pt.p_s) + H.potential(pt.s);
}

SurfacePoint reduce(const SurfaceModel& surface, SurfacePoint x)
{
    const double tp = surface.theta_period();
    x.theta -= tp * std::floor(x.theta / tp);
    if (surface.s_periodic()) x.s -= surface.L * std::floor(x.s / surface.L);
    return x;
}

CotangentPoint reduce(const SurfaceModel& surface, CotangentPoint pt)
{
    SurfacePoint x = reduce(surface, SurfacePoint{pt.theta, pt.s});
    pt.theta = x.theta;
    pt.s = x.s;
    return pt;
}

FiberMap::FiberMap(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A) : A_(A)
{
    if (surface.near_pole(A.s)) {
        aA_ = 0;
    } else {
        if (surface.is_sphere() && (A.s < 0 || A.s > surface.L))
            throw Error(ErrorCode::Precondition, "point outside the sphere chart [0,L]");
        aA_ = surface.kind == SurfaceKind::FlatTorus ? 1.0 : surface.a(A.s);
    }
    const double kin = H.E - H.potential(A.s);
    if (!(kin > 0)) throw Error(ErrorCode::EmptyFiber, "V(A) >= E: the fiber over A is empty");
    r_ = std::sqrt(2 * kin);
    // d(H|fiber) vanishes only if the fiber circle degenerates
    if (!(r_ > 0) || !std::isfinite(r_)) throw Error(ErrorCode::DegenerateFiber, "degenerate fiber radius");
}

CotangentPoint FiberMap::operator()(double omega) const
{
    return {A_.theta, A_.s, r_ * aA_ * std::cos(omega), r_ * std::sin(omega)};
}

std::array<double, 2> FiberMap::derivative(double omega) const
{
    return {-r_ * aA_ * std::sin(omega), r_ * std::cos(omega)};
}

FiberMap fiber_parametrization(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A)
{
    return FiberMap(H, surface, A);
}

}  // namespace fw
