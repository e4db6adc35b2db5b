#pragma once
// Action-angle data of the integrable system: leaf charts, orbit integrals, frequencies,
// and the length density of the flowed fiber.
#include <array>
#include <numbers>
#include <string>
#include <vector>

#include "dop853.hpp"
#include "effective.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace fw {

// Haar normalisation: angles live in [0,1), one full turn of theta is 2pi.
inline constexpr double kAngleUnit = 2 * std::numbers::pi;

enum class Regime { Oscillating, Circulating, Flat };
enum class EndTag { Seam, Elliptic, Hyperbolic, Periodic };
std::string to_string(Regime r);
std::string to_string(EndTag t);

struct LeafChart {
    int id = 0;
    Regime regime = Regime::Flat;
    int p_sign = 1;   // sign of p_theta
    int ps_sign = 0;  // direction of s-motion on circulating leaves
    double lo = 0, hi = 0;  // range of |p_theta| (flat torus: direction angle)
    EndTag lo_tag = EndTag::Seam, hi_tag = EndTag::Seam;
    int lo_crit = -1, hi_crit = -1;
    std::vector<int> maxima;
    double s_rep = 0;
    double sigma_lo() const;
    double sigma_hi() const;
    bool contains_sigma(double sigma) const;
};

struct SingularLeaf {
    int crit = 0;
    double s = 0;
    double P = 0;
    bool hyperbolic = false;
};

// |p_theta| = m; when crit >= 0 the level is stored as P_c + eps * x to keep x exact
struct Level {
    double m = 0;
    int crit = -1;
    double x = 0;
    int eps = 0;
};

struct OrbitPiece {
    enum Kind { Plain, TurnLeft, TurnRight, SaddleOsc, SaddleCirc } kind = Plain;
    double lo = 0, hi = 0;
    double s_ref = 0;
    int side = 0;
    double delta = 0;
    int crit = -1;
};

struct Orbit {
    bool oscillating = false;
    double m = 0, m2 = 0;
    int p_sign = 1;
    double s_lo = 0, s_hi = 0;
    std::vector<OrbitPiece> pieces;
};

struct OrbitData {
    double T = 0;       // period of the s-motion
    double dtheta = 0;  // advance of theta over one period
    double J = 0;       // loop integral of |p_s| ds
};

struct Frequencies {
    double nu1 = 0, nu2 = 0;
    double T = 0, dtheta = 0;
};

struct ActionOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
};

class ActionModel {
public:
    ActionModel(const HamiltonianModel& H, const SurfaceModel& surface, ActionOptions opt = {});

    bool flat() const { return flat_; }
    const HamiltonianModel& hamiltonian() const { return H_; }
    const SurfaceModel& surface() const { return surface_; }
    const Effective& effective() const;
    const std::vector<CriticalPoint>& critical_points() const;
    std::vector<SingularLeaf> singular_leaves() const;
    const std::vector<LeafChart>& charts() const { return charts_; }
    const LeafChart& chart(int id) const;
    // chart containing the covector xi at A (sign conventions of the fiber map)
    int chart_of(const SurfacePoint& A, double p_theta, double p_s) const;

    Level level(double m) const;
    Level level_near(int crit, double x, int eps) const;
    Level level_of_sigma(const LeafChart& c, double sigma) const;
    double sigma_of(const LeafChart& c, const Level& lv) const { return kAngleUnit * c.p_sign * lv.m; }

    Orbit build_orbit(const LeafChart& c, const Level& lv) const;
    template <std::size_t K, class G>
    std::array<double, K> orbit_integral(const Orbit& o, G&& g) const;

    OrbitData orbit_data(const LeafChart& c, const Level& lv, bool with_action = false) const;
    Frequencies frequencies(const LeafChart& c, const Level& lv) const;
    Frequencies frequencies(const LeafChart& c, double sigma) const;
    // frequencies from implicit differentiation of the action p2(p1, E)
    Frequencies frequencies_route2(const LeafChart& c, double sigma) const;
    double action_p2(const LeafChart& c, const Level& lv) const;
    double action_p2(const LeafChart& c, double sigma) const;
    std::array<double, 2> actions(const LeafChart& c, double sigma) const;

    // length density for a given velocity w = d nu / d(parameter), by phase-space quadrature
    double density(const LeafChart& c, const Level& lv, const std::array<double, 2>& w) const;
    // same quantity from n_theta orbit samples of the torus chart
    double density_grid(const LeafChart& c, double sigma, const std::array<double, 2>& w, int n_theta,
                        const IntegratorConfig& cfg) const;
    // d nu / d sigma by Richardson-extrapolated central differences
    std::array<double, 2> dnu_dsigma(const LeafChart& c, double sigma) const;
    double density_dsigma(const LeafChart& c, double sigma) const;

    CotangentPoint torus_chart(const LeafChart& c, double sigma, double theta1, double theta2,
                               const IntegratorConfig& cfg) const;
    int count_NA(const LeafChart& c, double sigma, const SurfacePoint& A) const;
    int count_NA(const LeafChart& c, const Level& lv, const SurfacePoint& A) const;

    // hyperbolic critical values within reach of the near-saddle substitutions
    double near_threshold(int crit) const;

private:
    struct Offset {
        bool valid = false;
        double x = 0;
        int eps = 0;
    };
    Offset offset_for(int k, const Level& lv) const;
    void enumerate_charts();
    void flat_charts();
    double flat_radius() const;

    HamiltonianModel H_;
    SurfaceModel surface_;
    ActionOptions opt_;
    bool flat_;
    std::vector<Effective> eff_;  // empty on the flat torus
    std::vector<LeafChart> charts_;
};

template <std::size_t K, class G>
std::array<double, K> ActionModel::orbit_integral(const Orbit& o, G&& g) const
{
    const Effective& eff = effective();
    std::array<double, K> total{};
    for (const OrbitPiece& pc : o.pieces) {
        auto f = [&](double u) {
            double s, Q, jac;
            switch (pc.kind) {
            case OrbitPiece::Plain: {
                s = u;
                const double a = eff.profile(s);
                Q = (eff.P2(s) - o.m2) / (a * a);
                jac = 1 / std::sqrt(Q);
                break;
            }
            case OrbitPiece::TurnLeft:
            case OrbitPiece::TurnRight: {
                const double dir = pc.kind == OrbitPiece::TurnLeft ? 1.0 : -1.0;
                s = pc.s_ref + dir * u * u;
                const double a = eff.profile(s);
                Q = eff.P2_offset(pc.s_ref, dir * u * u) / (a * a);
                jac = 2 * u / std::sqrt(Q);
                break;
            }
            case OrbitPiece::SaddleOsc: {
                const SaddleExpansion& e = eff.expansion(pc.crit);
                const double dt = pc.side * pc.delta;
                const double d = dt * std::cosh(u);
                s = pc.s_ref + d;
                const double a = eff.profile(s);
                const double ch = std::cosh(0.5 * u);
                const double den2 = e.R(d) + dt * e.divided(d, dt) / (2 * ch * ch);
                const double sh = pc.delta * std::sinh(u);
                Q = sh * sh * den2 / (a * a);
                jac = a / std::sqrt(den2);
                break;
            }
            default: {
                const SaddleExpansion& e = eff.expansion(pc.crit);
                const double d = pc.delta * std::sinh(u);
                s = pc.s_ref + d;
                const double a = eff.profile(s);
                const double th = std::tanh(u), ch = std::cosh(u);
                const double den2 = th * th * e.R(d) + e.r[0] / (ch * ch);
                const double c = pc.delta * ch;
                Q = c * c * den2 / (a * a);
                jac = a / std::sqrt(den2);
                break;
            }
            }
            std::array<double, K> v = g(s, Q);
            for (auto& x : v) x *= jac;
            return v;
        };
        const auto r = integrate_vec<K>(f, pc.lo, pc.hi, opt_.abs_tol, opt_.rel_tol, {}, 20000);
        for (std::size_t j = 0; j < K; ++j) total[j] += r.value[j];
    }
    if (o.oscillating)
        for (auto& v : total) v *= 2;
    return total;
}

}  // namespace fw
