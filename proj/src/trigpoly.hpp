#pragma once
// Finite trigonometric series f(s) = sum_k c_k cos(k w s) + sum_k d_k sin(k w s).
// cos coefficients are indexed from k = 0, sin coefficients from k = 1.
#include <vector>

#include "dual.hpp"

namespace fw {

class TrigPoly {
public:
    TrigPoly() = default;
    TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double base_freq);

    static TrigPoly constant(double c) { return TrigPoly({c}, {}, 1.0); }

    double operator()(double s) const;
    // out[j] = d^j f / ds^j at s, j = 0..n
    void derivatives(double s, int n, double* out) const;
    double derivative(double s, int order) const;

    // value, first and second derivative for generic scalar (double or Dual)
    template <class T>
    void eval2(const T& s, T& f, T& f1, T& f2) const;
    template <class T>
    T eval(const T& s) const;

    // Taylor coefficients f^(n)(s0)/n! for n = 0..degree
    std::vector<double> taylor(double s0, int degree) const;

    double freq() const { return w_; }
    int harmonics() const;
    bool is_zero() const;
    bool has_cos_terms() const;
    bool has_sin_terms() const;
    // f(s) - f(t) without cancellation for nearby arguments
    double difference(double s, double t) const;
    // f(t + d) - f(t)
    double offset_difference(double t, double d) const;
    // c * f + shift
    TrigPoly affine(double c, double shift) const;
    // pointwise product; both factors must share the base frequency
    static TrigPoly product(const TrigPoly& f, const TrigPoly& g);

    const std::vector<double>& cos_coeffs() const { return c_; }
    const std::vector<double>& sin_coeffs() const { return d_; }

private:
    std::vector<double> c_;  // k = 0..
    std::vector<double> d_;  // k = 1..
    double w_ = 1.0;
};

template <class T>
void TrigPoly::eval2(const T& s, T& f, T& f1, T& f2) const
{
    using std::cos;
    using std::sin;
    f = T(c_.empty() ? 0.0 : c_[0]);
    f1 = T(0.0);
    f2 = T(0.0);
    const int n = harmonics();
    if (n == 0) return;
    const T x = w_ * s;
    const T c1 = cos(x), s1 = sin(x);
    T ck = c1, sk = s1;
    for (int k = 1; k <= n; ++k) {
        const double a = k < (int)c_.size() ? c_[k] : 0.0;
        const double b = k - 1 < (int)d_.size() ? d_[k - 1] : 0.0;
        const double kw = k * w_;
        f += a * ck + b * sk;
        f1 += kw * (b * ck - a * sk);
        f2 -= kw * kw * (a * ck + b * sk);
        const T cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
}

template <class T>
T TrigPoly::eval(const T& s) const
{
    using std::cos;
    using std::sin;
    T f = T(c_.empty() ? 0.0 : c_[0]);
    const int n = harmonics();
    if (n == 0) return f;
    const T x = w_ * s;
    const T c1 = cos(x), s1 = sin(x);
    T ck = c1, sk = s1;
    for (int k = 1; k <= n; ++k) {
        const double a = k < (int)c_.size() ? c_[k] : 0.0;
        const double b = k - 1 < (int)d_.size() ? d_[k - 1] : 0.0;
        f += a * ck + b * sk;
        const T cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
    return f;
}

// truncated power series helpers (coefficient vectors, index = power)
std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b, int degree);
double series_eval(const std::vector<double>& a, double x);

}  // namespace fw
