#pragma once
// Adaptive Gauss-Kronrod (21 point) quadrature for vector-valued integrands and
// fixed Gauss-Legendre panels. Node tables come from Boost.Math.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fw {

template <std::size_t K>
struct QuadResult {
    std::array<double, K> value{};
    std::array<double, K> error{};
    int intervals = 0;
    bool converged = true;
};

namespace detail {

template <std::size_t K, class F>
void gk21(F& f, double a, double b, std::array<double, K>& val, std::array<double, K>& err)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::array<double, K> kr{}, ga{};
    {
        const std::array<double, K> f0 = f(mid);
        for (std::size_t j = 0; j < K; ++j) kr[j] = f0[j] * wk[0];
    }
    for (unsigned i = 1; i < x.size(); ++i) {
        const std::array<double, K> fp = f(mid + half * x[i]);
        const std::array<double, K> fm = f(mid - half * x[i]);
        for (std::size_t j = 0; j < K; ++j) {
            kr[j] += (fp[j] + fm[j]) * wk[i];
            if (i & 1) ga[j] += (fp[j] + fm[j]) * wg[i / 2];
        }
    }
    for (std::size_t j = 0; j < K; ++j) {
        val[j] = kr[j] * half;
        err[j] = std::fabs((kr[j] - ga[j]) * half);
    }
}

}  // namespace detail

// Integrates f over [a,b] split at the given breakpoints. Each component must satisfy
// err <= max(abs_tol, rel_tol*|value|).
template <std::size_t K, class F>
QuadResult<K> integrate_vec(F&& f, double a, double b, double abs_tol, double rel_tol,
                            const std::vector<double>& breaks = {}, int max_intervals = 4000)
{
    struct Piece {
        double a, b;
        std::array<double, K> val, err;
        double key;
        bool operator<(const Piece& o) const { return key < o.key; }
    };
    auto weight = [&](const std::array<double, K>& e) {
        double m = 0;
        for (double v : e) m = std::max(m, v);
        return m;
    };
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::priority_queue<Piece> heap;
    std::array<double, K> total{}, toterr{};
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Piece p{pts[i], pts[i + 1], {}, {}, 0};
        detail::gk21<K>(f, p.a, p.b, p.val, p.err);
        p.key = weight(p.err);
        for (std::size_t j = 0; j < K; ++j) {
            total[j] += p.val[j];
            toterr[j] += p.err[j];
        }
        heap.push(p);
    }
    QuadResult<K> res;
    auto done = [&]() {
        for (std::size_t j = 0; j < K; ++j)
            if (toterr[j] > std::max(abs_tol, rel_tol * std::fabs(total[j]))) return false;
        return true;
    };
    int count = (int)heap.size();
    while (!done()) {
        if (count >= max_intervals) {
            res.converged = false;
            break;
        }
        Piece p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            res.converged = false;
            heap.push(p);
            break;
        }
        Piece l{p.a, m, {}, {}, 0}, r{m, p.b, {}, {}, 0};
        detail::gk21<K>(f, l.a, l.b, l.val, l.err);
        detail::gk21<K>(f, r.a, r.b, r.val, r.err);
        l.key = weight(l.err);
        r.key = weight(r.err);
        for (std::size_t j = 0; j < K; ++j) {
            total[j] += l.val[j] + r.val[j] - p.val[j];
            toterr[j] += l.err[j] + r.err[j] - p.err[j];
        }
        heap.push(l);
        heap.push(r);
        ++count;
    }
    // re-sum in interval order for reproducible rounding
    std::vector<Piece> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    res.value = {};
    res.error = {};
    for (const Piece& p : all)
        for (std::size_t j = 0; j < K; ++j) {
            res.value[j] += p.val[j];
            res.error[j] += p.err[j];
        }
    res.intervals = (int)all.size();
    return res;
}

template <class F>
double integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 const std::vector<double>& breaks = {}, double* err = nullptr)
{
    auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
    auto r = integrate_vec<1>(g, a, b, abs_tol, rel_tol, breaks);
    if (err) *err = r.error[0];
    return r.value[0];
}

// Fixed 20-point Gauss-Legendre rule on [a,b].
template <class F>
auto gauss_legendre20(F&& f, double a, double b) -> decltype(f(a))
{
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    decltype(f(a)) acc = f(mid + half * x[0]) * w[0];
    acc = acc + f(mid - half * x[0]) * w[0];
    for (unsigned i = 1; i < x.size(); ++i) {
        acc = acc + f(mid + half * x[i]) * w[i];
        acc = acc + f(mid - half * x[i]) * w[i];
    }
    return acc * half;
}

}  // namespace fw
