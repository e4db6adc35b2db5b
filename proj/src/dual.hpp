#pragma once
// Forward-mode dual numbers: value plus one directional derivative.
#include <algorithm>
#include <cmath>

namespace fw {

struct Dual {
    double v = 0.0;
    double d = 0.0;
    constexpr Dual() = default;
    constexpr Dual(double value) : v(value), d(0.0) {}
    constexpr Dual(double value, double deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { *this = Dual(v / o.v, (d * o.v - v * o.d) / (o.v * o.v)); return *this; }
};

inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(const Dual& a, const Dual& b)
{
    const double q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}
inline Dual operator+(const Dual& a, double b) { return {a.v + b, a.d}; }
inline Dual operator+(double a, const Dual& b) { return {a + b.v, b.d}; }
inline Dual operator-(const Dual& a, double b) { return {a.v - b, a.d}; }
inline Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d}; }
inline Dual operator*(const Dual& a, double b) { return {a.v * b, a.d * b}; }
inline Dual operator*(double a, const Dual& b) { return {a * b.v, a * b.d}; }
inline Dual operator/(const Dual& a, double b) { return {a.v / b, a.d / b}; }
inline Dual operator/(double a, const Dual& b)
{
    const double q = a / b.v;
    return {q, -q * b.d / b.v};
}

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator<(const Dual& a, double b) { return a.v < b; }
inline bool operator>(const Dual& a, double b) { return a.v > b; }
inline bool operator<=(const Dual& a, double b) { return a.v <= b; }
inline bool operator>=(const Dual& a, double b) { return a.v >= b; }

inline Dual sin(const Dual& a) { return {std::sin(a.v), a.d * std::cos(a.v)}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), -a.d * std::sin(a.v)}; }
inline Dual exp(const Dual& a)
{
    const double e = std::exp(a.v);
    return {e, a.d * e};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(const Dual& a)
{
    const double r = std::sqrt(a.v);
    return {r, r > 0 ? a.d / (2 * r) : 0.0};
}
inline Dual sinh(const Dual& a) { return {std::sinh(a.v), a.d * std::cosh(a.v)}; }
inline Dual cosh(const Dual& a) { return {std::cosh(a.v), a.d * std::sinh(a.v)}; }
inline Dual tanh(const Dual& a)
{
    const double t = std::tanh(a.v);
    return {t, a.d * (1 - t * t)};
}
inline Dual abs(const Dual& a) { return a.v < 0 ? -a : a; }

// acosh for arguments that may be close to the overflow threshold of z*z
inline double acosh_big(double z)
{
    if (z < 1e8) return std::acosh(z);
    return std::log(z) + std::log1p(std::sqrt(1 - 1 / (z * z)));
}
inline Dual acosh_big(const Dual& z)
{
    const double inv = 1 / z.v;
    const double root = std::sqrt(std::max(0.0, 1 - inv * inv));
    return {acosh_big(z.v), root > 0 ? z.d * inv / root : 0.0};
}
inline double asinh_big(double z) { return std::asinh(z); }
inline Dual asinh_big(const Dual& z)
{
    const double az = std::fabs(z.v);
    const double denom = az > 1 ? az * std::sqrt(1 + 1 / (z.v * z.v)) : std::sqrt(1 + z.v * z.v);
    return {std::asinh(z.v), z.d / denom};
}

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }
inline double deriv(double) { return 0.0; }
inline double deriv(const Dual& x) { return x.d; }

}  // namespace fw
