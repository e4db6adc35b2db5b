#pragma once
// Clairaut function P(s) = a(s) sqrt(2(E - V(s))) on a surface of revolution, its critical
// points, and local expansions around the hyperbolic ones.
#include <vector>

#include "dual.hpp"
#include "geometry.hpp"

namespace fw {

struct CriticalPoint {
    double s = 0;
    double P = 0;       // Clairaut value
    double P2_dd = 0;   // second derivative of P^2
    bool hyperbolic = false;
};

// D(delta) = P^2(s_c + delta) - P_c^2 = delta^2 R(delta), R from a truncated Taylor series.
struct SaddleExpansion {
    double s_c = 0, Pc = 0, a_c = 1;
    double delta1 = 0.5;  // radius of the near region
    double kappa = 0;     // Lyapunov exponent of the hyperbolic orbit
    std::vector<double> r;
    // reach[n]: largest |delta| for which dropping the terms above degree n is below roundoff
    std::vector<double> reach;

    int degree(double ad) const
    {
        for (std::size_t n = 0; n < reach.size(); ++n)
            if (ad <= reach[n]) return (int)n;
        return (int)r.size() - 1;
    }
    void set_reach();

    template <class T>
    T R(const T& d) const
    {
        T acc = T(0.0);
        for (int i = degree(std::fabs(value(d))); i >= 0; --i) acc = acc * d + r[i];
        return acc;
    }
    template <class T>
    T R1(const T& d) const
    {
        T acc = T(0.0);
        for (int i = degree(std::fabs(value(d))); i >= 1; --i) acc = acc * d + i * r[i];
        return acc;
    }
    // divided difference (R(u) - R(v)) / (u - v)
    template <class T>
    T divided(const T& u, const T& v) const
    {
        T b = T(0.0), vk = T(1.0), acc = T(0.0);
        const int n = degree(std::max(std::fabs(value(u)), std::fabs(value(v))));
        for (int k = 1; k <= n; ++k) {
            b = u * b + vk;
            vk = vk * v;
            acc = acc + r[k] * b;
        }
        return acc;
    }
    // positive delta with delta^2 R(side*delta) = rhs
    double solve_turning(double rhs, int side) const;
};

class Effective {
public:
    Effective(const HamiltonianModel& H, const SurfaceModel& surface);

    double P2(double s) const { return P2_(s); }
    double P(double s) const;
    double P2_diff(double s, double t) const { return P2_.difference(s, t); }
    double P2_offset(double t, double d) const { return P2_.offset_difference(t, d); }
    void P2_derivs(double s, int n, double* out) const { P2_.derivatives(s, n, out); }
    const TrigPoly& P2_series() const { return P2_; }
    double profile(double s) const { return a_(s); }
    const TrigPoly& profile_series() const { return a_; }

    // domain of s: [0, L) periodic on the torus, (0, L) on the sphere
    double lo() const { return 0.0; }
    double hi() const { return L_; }
    bool periodic() const { return periodic_; }
    double period() const { return L_; }

    const std::vector<CriticalPoint>& critical() const { return crit_; }
    const SaddleExpansion& expansion(int crit_index) const;
    double scale() const { return p2_scale_; }

private:
    void classify();
    TrigPoly a_;
    TrigPoly P2_;
    double L_;
    bool periodic_;
    double p2_scale_ = 1;
    std::vector<CriticalPoint> crit_;
    std::vector<SaddleExpansion> saddles_;  // aligned with crit_ (empty r for elliptic)
};

}  // namespace fw
