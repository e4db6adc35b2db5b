#include "trigpoly.hpp"

#include <cmath>

namespace fw {

TrigPoly::TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double base_freq)
    : c_(std::move(cos_coeffs)), d_(std::move(sin_coeffs)), w_(base_freq)
{
}

int TrigPoly::harmonics() const
{
    int n = 0;
    for (int k = 1; k < (int)c_.size(); ++k)
        if (c_[k] != 0) n = std::max(n, k);
    for (int k = 1; k <= (int)d_.size(); ++k)
        if (d_[k - 1] != 0) n = std::max(n, k);
    return n;
}

bool TrigPoly::is_zero() const
{
    for (double c : c_)
        if (c != 0) return false;
    for (double d : d_)
        if (d != 0) return false;
    return true;
}

bool TrigPoly::has_cos_terms() const
{
    for (double c : c_)
        if (c != 0) return true;
    return false;
}

bool TrigPoly::has_sin_terms() const
{
    for (double d : d_)
        if (d != 0) return true;
    return false;
}

double TrigPoly::operator()(double s) const { return eval(s); }

void TrigPoly::derivatives(double s, int n, double* out) const
{
    for (int j = 0; j <= n; ++j) out[j] = 0;
    if (!c_.empty()) out[0] = c_[0];
    const int m = harmonics();
    if (m == 0) return;
    const double x = w_ * s;
    const double c1 = std::cos(x), s1 = std::sin(x);
    double ck = c1, sk = s1;
    for (int k = 1; k <= m; ++k) {
        double a = k < (int)c_.size() ? c_[k] : 0.0;
        double b = k - 1 < (int)d_.size() ? d_[k - 1] : 0.0;
        const double kw = k * w_;
        double scale = 1;
        for (int j = 0; j <= n; ++j) {
            out[j] += scale * (a * ck + b * sk);
            // d/dx (a cos + b sin) = b cos - a sin
            const double na = b, nb = -a;
            a = na;
            b = nb;
            scale *= kw;
        }
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
}

double TrigPoly::derivative(double s, int order) const
{
    std::vector<double> out(order + 1);
    derivatives(s, order, out.data());
    return out[order];
}

std::vector<double> TrigPoly::taylor(double s0, int degree) const
{
    std::vector<double> out(degree + 1);
    derivatives(s0, degree, out.data());
    double fact = 1;
    for (int n = 1; n <= degree; ++n) {
        fact *= n;
        out[n] /= fact;
    }
    return out;
}

double TrigPoly::difference(double s, double t) const { return offset_difference(t, s - t); }

double TrigPoly::offset_difference(double t, double d) const
{
    const int m = harmonics();
    double acc = 0;
    for (int k = 1; k <= m; ++k) {
        const double a = k < (int)c_.size() ? c_[k] : 0.0;
        const double b = k - 1 < (int)d_.size() ? d_[k - 1] : 0.0;
        const double kw = k * w_;
        const double half = std::sin(0.5 * kw * d);
        const double mid = kw * (t + 0.5 * d);
        acc += 2 * half * (b * std::cos(mid) - a * std::sin(mid));
    }
    return acc;
}

TrigPoly TrigPoly::affine(double c, double shift) const
{
    std::vector<double> cc = c_, dd = d_;
    if (cc.empty()) cc.push_back(0.0);
    for (double& x : cc) x *= c;
    for (double& x : dd) x *= c;
    cc[0] += shift;
    return TrigPoly(std::move(cc), std::move(dd), w_);
}

TrigPoly TrigPoly::product(const TrigPoly& f, const TrigPoly& g)
{
    const int nf = f.harmonics(), ng = g.harmonics();
    const int n = nf + ng;
    std::vector<double> cc(n + 1, 0.0), dd(std::max(n, 0), 0.0);
    auto fc = [&](const TrigPoly& p, int k) { return k < (int)p.c_.size() ? p.c_[k] : 0.0; };
    auto fs = [&](const TrigPoly& p, int k) { return k >= 1 && k - 1 < (int)p.d_.size() ? p.d_[k - 1] : 0.0; };
    auto add_cos = [&](int k, double v) { cc[std::abs(k)] += v; };
    auto add_sin = [&](int k, double v) {
        if (k > 0) dd[k - 1] += v;
        else if (k < 0) dd[-k - 1] -= v;
    };
    for (int i = 0; i <= nf; ++i)
        for (int j = 0; j <= ng; ++j) {
            const double ci = fc(f, i), si = fs(f, i), cj = fc(g, j), sj = fs(g, j);
            // cos cos, sin sin, cos sin, sin cos
            add_cos(i + j, 0.5 * (ci * cj - si * sj));
            add_cos(i - j, 0.5 * (ci * cj + si * sj));
            add_sin(i + j, 0.5 * (ci * sj + si * cj));
            add_sin(j - i, 0.5 * ci * sj);
            add_sin(i - j, 0.5 * si * cj);
        }
    return TrigPoly(std::move(cc), std::move(dd), f.w_);
}

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b, int degree)
{
    std::vector<double> out(degree + 1, 0.0);
    for (int i = 0; i <= degree && i < (int)a.size(); ++i)
        for (int j = 0; i + j <= degree && j < (int)b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

double series_eval(const std::vector<double>& a, double x)
{
    double r = 0;
    for (int i = (int)a.size() - 1; i >= 0; --i) r = r * x + a[i];
    return r;
}

}  // namespace fw
