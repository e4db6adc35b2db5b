#pragma once
// Hamiltonian vector field, its linearization, and the integrator front end.
#include <array>
#include <optional>

#include "dop853.hpp"
#include "geometry.hpp"

namespace fw {

using Vec4 = std::array<double, 4>;
using Vec8 = std::array<double, 8>;

struct PhaseState {
    CotangentPoint point;
    std::optional<Vec4> tangent;  // (d theta, d s, d p_theta, d p_s)
};

// Evaluates the field and its Jacobian. State order (theta, s, p_theta, p_s).
class FlowSystem {
public:
    FlowSystem(const HamiltonianModel& H, const SurfaceModel& surface);
    void field(const double* y, double* dy) const;
    void variational(const double* y, double* dy) const;  // 8 entries: state then tangent
    // energy and Clairaut integral (p_theta itself)
    double energy(const double* y) const;

    template <class T>
    void profile(const T& s, T& a, T& a1, T& a2) const
    {
        if (flat_) {
            a = T(1.0);
            a1 = T(0.0);
            a2 = T(0.0);
        } else {
            surface_->a.eval2(s, a, a1, a2);
        }
    }
    template <class T>
    void potential(const T& s, T& v1, T& v2) const
    {
        if (geodesic_) {
            v1 = T(0.0);
            v2 = T(0.0);
        } else {
            T v0;
            H_->V.eval2(s, v0, v1, v2);
        }
    }
    const SurfaceModel& surface() const { return *surface_; }
    const HamiltonianModel& hamiltonian() const { return *H_; }
private:
    void check_pole(double s) const;
    const HamiltonianModel* H_;
    const SurfaceModel* surface_;
    bool flat_, geodesic_;
};

Vec4 vector_field(const HamiltonianModel& H, const SurfaceModel& surface, const CotangentPoint& pt);
Vec4 variational_field(const HamiltonianModel& H, const SurfaceModel& surface, const PhaseState& state);

struct AdvanceReport {
    double energy_drift = 0;
    double clairaut_drift = 0;
    long steps = 0;
};

// Advances state over [t0, t1]; the tangent is carried when present.
PhaseState advance(const HamiltonianModel& H, const SurfaceModel& surface, const PhaseState& state, double t0,
                   double t1, const IntegratorConfig& cfg, AdvanceReport* report = nullptr);

// Motion along the meridian double cover of a sphere, coordinate sigma in [0, 2L).
// State (sigma, p_sigma).
std::array<double, 2> advance_meridian(const HamiltonianModel& H, const SurfaceModel& surface,
                                       std::array<double, 2> state, double t0, double t1,
                                       const IntegratorConfig& cfg);

}  // namespace fw
