#include "flow.hpp"

#include <cmath>

#include "error.hpp"

namespace fw {

FlowSystem::FlowSystem(const HamiltonianModel& H, const SurfaceModel& surface)
    : H_(&H), surface_(&surface), flat_(surface.kind == SurfaceKind::FlatTorus),
      geodesic_(H.kind == HamiltonianKind::Geodesic)
{
}

void FlowSystem::check_pole(double s) const
{
    if (!surface_->is_sphere()) return;
    if (s <= surface_->pole_tolerance() || s >= surface_->L - surface_->pole_tolerance())
        throw Error(ErrorCode::PoleCrossing, "trajectory reached a pole at s=" + std::to_string(s));
}

void FlowSystem::field(const double* y, double* dy) const
{
    check_pole(y[1]);
    double a, a1, a2, v1, v2;
    profile(y[1], a, a1, a2);
    potential(y[1], v1, v2);
    const double ia2 = 1 / (a * a);
    const double p = y[2];
    dy[0] = p * ia2;
    dy[1] = y[3];
    dy[2] = 0;
    dy[3] = p * p * a1 * ia2 / a - v1;
}

void FlowSystem::variational(const double* y, double* dy) const
{
    check_pole(y[1]);
    double a, a1, a2, v1, v2;
    profile(y[1], a, a1, a2);
    potential(y[1], v1, v2);
    const double ia = 1 / a, ia2 = ia * ia, ia3 = ia2 * ia;
    const double p = y[2];
    dy[0] = p * ia2;
    dy[1] = y[3];
    dy[2] = 0;
    dy[3] = p * p * a1 * ia3 - v1;
    const double dth_ds = -2 * p * a1 * ia3, dth_dp = ia2;
    const double dps_ds = p * p * (a2 * ia3 - 3 * a1 * a1 * ia2 * ia2) - v2;
    const double dps_dp = 2 * p * a1 * ia3;
    const double *u = y + 4;
    dy[4] = dth_ds * u[1] + dth_dp * u[2];
    dy[5] = u[3];
    dy[6] = 0;
    dy[7] = dps_ds * u[1] + dps_dp * u[2];
}

double FlowSystem::energy(const double* y) const
{
    double a, a1, a2;
    profile(y[1], a, a1, a2);
    const double v = geodesic_ ? 0.0 : H_->V(y[1]);
    return 0.5 * (y[2] * y[2] / (a * a) + y[3] * y[3]) + v;
}

Vec4 vector_field(const HamiltonianModel& H, const SurfaceModel& surface, const CotangentPoint& pt)
{
    if (surface.near_pole(pt.s)) throw Error(ErrorCode::PoleEvaluation, "vector field at a pole");
    FlowSystem sys(H, surface);
    const double y[4] = {pt.theta, pt.s, pt.p_theta, pt.p_s};
    Vec4 dy;
    sys.field(y, dy.data());
    return dy;
}

Vec4 variational_field(const HamiltonianModel& H, const SurfaceModel& surface, const PhaseState& state)
{
    if (!state.tangent) throw Error(ErrorCode::MissingTangent, "variational field needs a tangent vector");
    if (surface.near_pole(state.point.s)) throw Error(ErrorCode::PoleEvaluation, "variational field at a pole");
    FlowSystem sys(H, surface);
    const auto& pt = state.point;
    const auto& u = *state.tangent;
    const double y[8] = {pt.theta, pt.s, pt.p_theta, pt.p_s, u[0], u[1], u[2], u[3]};
    double dy[8];
    sys.variational(y, dy);
    return {dy[4], dy[5], dy[6], dy[7]};
}

PhaseState advance(const HamiltonianModel& H, const SurfaceModel& surface, const PhaseState& state, double t0,
                   double t1, const IntegratorConfig& cfg, AdvanceReport* report)
{
    if (surface.near_pole(state.point.s)) throw Error(ErrorCode::PoleCrossing, "initial point at a pole");
    FlowSystem sys(H, surface);
    const auto& pt = state.point;
    PhaseState out = state;
    double t = t0, h = 0;
    long steps = 0;
    double e0, e1, c0 = pt.p_theta, c1;
    if (state.tangent) {
        const auto& u = *state.tangent;
        Vec8 y = {pt.theta, pt.s, pt.p_theta, pt.p_s, u[0], u[1], u[2], u[3]};
        e0 = sys.energy(y.data());
        auto f = [&](double, const Vec8& z, Vec8& dz) { sys.variational(z.data(), dz.data()); };
        Dop853<double, 8> ode;
        ode.run(f, t, y, t1, h, cfg);
        steps = ode.steps;
        out.point = {y[0], y[1], y[2], y[3]};
        out.tangent = Vec4{y[4], y[5], y[6], y[7]};
        e1 = sys.energy(y.data());
        c1 = y[2];
    } else {
        Vec4 y = {pt.theta, pt.s, pt.p_theta, pt.p_s};
        e0 = sys.energy(y.data());
        auto f = [&](double, const Vec4& z, Vec4& dz) { sys.field(z.data(), dz.data()); };
        Dop853<double, 4> ode;
        ode.run(f, t, y, t1, h, cfg);
        steps = ode.steps;
        out.point = {y[0], y[1], y[2], y[3]};
        e1 = sys.energy(y.data());
        c1 = y[2];
    }
    if (report) {
        report->energy_drift = std::fabs(e1 - e0);
        report->clairaut_drift = std::fabs(c1 - c0);
        report->steps = steps;
    }
    return out;
}

std::array<double, 2> advance_meridian(const HamiltonianModel& H, const SurfaceModel& surface,
                                       std::array<double, 2> state, double t0, double t1,
                                       const IntegratorConfig& cfg)
{
    if (H.kind == HamiltonianKind::Geodesic) {
        state[0] += state[1] * (t1 - t0);
    } else {
        auto f = [&](double, const std::array<double, 2>& z, std::array<double, 2>& dz) {
            double v0, v1, v2;
            H.V.eval2(z[0], v0, v1, v2);
            dz[0] = z[1];
            dz[1] = -v1;
        };
        Dop853<double, 2> ode;
        double t = t0, h = 0;
        ode.run(f, t, state, t1, h, cfg);
    }
    const double period = 2 * surface.L;
    state[0] -= period * std::floor(state[0] / period);
    return state;
}

}  // namespace fw
