#pragma once
// Surfaces of revolution, the flat torus, and Hamiltonians on their cotangent bundles.
#include <array>
#include <string>

#include "trigpoly.hpp"

namespace fw {

enum class SurfaceKind { RevolutionTorus, RevolutionSphere, FlatTorus };
enum class HamiltonianKind { Geodesic, Schrodinger };

std::string to_string(SurfaceKind k);
std::string to_string(HamiltonianKind k);

struct SurfaceModel {
    SurfaceKind kind = SurfaceKind::FlatTorus;
    double L = 1.0;
    TrigPoly a = TrigPoly::constant(1.0);  // profile; identically 1 on the flat torus

    static SurfaceModel flat_torus();
    static SurfaceModel revolution_torus(double L, std::vector<double> a_cos, std::vector<double> a_sin);
    static SurfaceModel revolution_sphere(double L, std::vector<double> a_sin);

    // base frequency of the profile series: 2pi/L (torus), pi/L (sphere), 2pi (flat)
    static double base_frequency(SurfaceKind kind, double L);

    void validate() const;
    bool is_revolution() const { return kind != SurfaceKind::FlatTorus; }
    bool is_sphere() const { return kind == SurfaceKind::RevolutionSphere; }
    bool s_periodic() const { return kind != SurfaceKind::RevolutionSphere; }
    double theta_period() const;  // 2pi on revolution surfaces, 1 on the flat torus
    double pole_tolerance() const { return 1e-9 * L; }
    bool near_pole(double s) const;
    int pole_index(double s) const;  // 0 at s=0, 1 at s=L, -1 otherwise
};

struct HamiltonianModel {
    HamiltonianKind kind = HamiltonianKind::Geodesic;
    double E = 0.5;
    TrigPoly V;  // zero for the geodesic kind

    static HamiltonianModel geodesic(double E);
    static HamiltonianModel schrodinger(double E, const SurfaceModel& surface, std::vector<double> v_cos,
                                        std::vector<double> v_sin);
    double potential(double s) const { return kind == HamiltonianKind::Geodesic ? 0.0 : V(s); }
    void validate(const SurfaceModel& surface) const;
};

struct SurfacePoint {
    double theta = 0;  // theta_geo on revolution surfaces, x1 on the flat torus
    double s = 0;      // s on revolution surfaces, x2 on the flat torus
};

struct CotangentPoint {
    double theta = 0, s = 0, p_theta = 0, p_s = 0;
};

// (g11, g12, g22)
std::array<double, 3> metric_coeffs(const SurfaceModel& surface, const SurfacePoint& x);
double hamiltonian_value(const HamiltonianModel& H, const SurfaceModel& surface, const CotangentPoint& pt);
SurfacePoint reduce(const SurfaceModel& surface, SurfacePoint x);
CotangentPoint reduce(const SurfaceModel& surface, CotangentPoint pt);

// omega -> (A, xi(omega)) with xi = r (a_A cos w, sin w), r = sqrt(2(E - V(A)))
class FiberMap {
public:
    FiberMap(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A);
    CotangentPoint operator()(double omega) const;
    // d xi / d omega
    std::array<double, 2> derivative(double omega) const;
    double radius() const { return r_; }
    double profile_at_A() const { return aA_; }
    // Clairaut magnitude bound r * a_A
    double clairaut_max() const { return r_ * aA_; }
    const SurfacePoint& point() const { return A_; }
private:
    SurfacePoint A_;
    double r_ = 0, aA_ = 1;
};

FiberMap fiber_parametrization(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A);

}  // namespace fw
