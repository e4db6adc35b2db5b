#pragma once
// Dormand-Prince 8(5,3) explicit Runge-Kutta scheme with embedded error control.
// The scalar type may be double or Dual; derivative parts take part in the error norm.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "dual.hpp"
#include "error.hpp"

namespace fw {

struct IntegratorConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    long max_steps = 50000000;
};

namespace detail {
inline int scalar_parts(double x, double* out)
{
    out[0] = x;
    return 1;
}
inline int scalar_parts(const Dual& x, double* out)
{
    out[0] = x.v;
    out[1] = x.d;
    return 2;
}
}  // namespace detail

template <class T, std::size_t N>
class Dop853 {
public:
    using State = std::array<T, N>;

    long steps = 0;
    long rejected = 0;

    // Advances y from t towards t_end. After each accepted step stop(t, y) is
    // consulted; when it returns true the integration halts there and run returns true.
    // h carries the step size between calls (0 requests an initial guess).
    template <class F, class Stop>
    bool run(F& f, double& t, State& y, double t_end, double& h, const IntegratorConfig& cfg, Stop&& stop)
    {
        if (!(t_end > t)) return false;
        State k1;
        f(t, y, k1);
        if (h <= 0) h = initial_step(y, k1, cfg);
        h = std::min(h, cfg.max_step);
        double facold = 1e-4;
        bool reject = false;
        const double expo1 = 1.0 / 8.0, facc1 = 3.0, facc2 = 1.0 / 6.0, safe = 0.9;
        for (;;) {
            bool last = false;
            double hs = h;
            if (t + hs >= t_end || t + 1.01 * hs >= t_end) {
                hs = t_end - t;
                last = true;
            }
            if (hs < 1e-14 * (1 + std::fabs(t)))
                throw Error(ErrorCode::StepFailure, "step size underflow at t=" + std::to_string(t));
            if (++steps > cfg.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
            State ynew, k4;
            const double err = hs * step12(f, t, y, hs, k1, ynew, k4, cfg);
            const double fac11 = std::pow(std::max(err, 1e-300), expo1);
            double fac = fac11 / std::pow(facold, 0.0);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = hs / fac;
            if (err <= 1.0) {
                facold = std::max(err, 1e-4);
                t = last ? t_end : t + hs;
                y = ynew;
                f(t, y, k1);
                if (std::fabs(hnew) > cfg.max_step) hnew = cfg.max_step;
                if (reject) hnew = std::min(hnew, hs);
                reject = false;
                if (!last || hnew > h) h = hnew;
                if (stop(t, y)) return true;
                if (last) return false;
            } else {
                h = hs / std::min(facc1, fac11 / safe);
                reject = true;
                ++rejected;
            }
        }
    }

    template <class F>
    void run(F& f, double& t, State& y, double t_end, double& h, const IntegratorConfig& cfg)
    {
        run(f, t, y, t_end, h, cfg, [](double, const State&) { return false; });
    }

private:
    static double norm_scaled(const State& y, const State& d, const IntegratorConfig& cfg)
    {
        double acc = 0;
        int count = 0;
        double py[2], pd[2];
        for (std::size_t i = 0; i < N; ++i) {
            const int m = detail::scalar_parts(y[i], py);
            detail::scalar_parts(d[i], pd);
            for (int j = 0; j < m; ++j) {
                const double sk = cfg.abs_tol + cfg.rel_tol * std::fabs(py[j]);
                acc += (pd[j] / sk) * (pd[j] / sk);
                ++count;
            }
        }
        return std::sqrt(acc / count);
    }

    static double initial_step(const State& y, const State& f0, const IntegratorConfig& cfg)
    {
        const double d0 = norm_scaled(y, y, cfg), d1 = norm_scaled(y, f0, cfg);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        return std::min(std::max(h0, 1e-8), cfg.max_step);
    }

    template <class F>
    static double step12(F& f, double t, const State& w, double h, const State& k1, State& out, State& k4,
                         const IntegratorConfig& cfg)
    {
        constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                         c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                         c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                         c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                         c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
        constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                         b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                         b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                         b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
        constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                         a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                         a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                         a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                         a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                         a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                         a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                         a76 = -1.7578125E-2;
        constexpr double a81 = 3.70920001185047927108779319836E-2, a84 = 1.70383925712239993810214054705E-1,
                         a85 = 1.07262030446373284651809199168E-1, a86 = -1.53194377486244017527936158236E-2,
                         a87 = 8.27378916381402288758473766002E-3, a91 = 6.24110958716075717114429577812E-1,
                         a94 = -3.36089262944694129406857109825E0, a95 = -8.68219346841726006818189891453E-1,
                         a96 = 2.75920996994467083049415600797E1, a97 = 2.01540675504778934086186788979E1,
                         a98 = -4.34898841810699588477366255144E1, a101 = 4.77662536438264365890433908527E-1,
                         a104 = -2.48811461997166764192642586468E0, a105 = -5.90290826836842996371446475743E-1,
                         a106 = 2.12300514481811942347288949897E1, a107 = 1.52792336328824235832596922938E1,
                         a108 = -3.32882109689848629194453265587E1, a109 = -2.03312017085086261358222928593E-2;
        constexpr double a111 = -9.3714243008598732571704021658E-1, a114 = 5.18637242884406370830023853209E0,
                         a115 = 1.09143734899672957818500254654E0, a116 = -8.14978701074692612513997267357E0,
                         a117 = -1.85200656599969598641566180701E1, a118 = 2.27394870993505042818970056734E1,
                         a119 = 2.49360555267965238987089396762E0, a1110 = -3.0467644718982195003823669022E0,
                         a121 = 2.27331014751653820792359768449E0, a124 = -1.05344954667372501984066689879E1,
                         a125 = -2.00087205822486249909675718444E0, a126 = -1.79589318631187989172765950534E1,
                         a127 = 2.79488845294199600508499808837E1, a128 = -2.85899827713502369474065508674E0,
                         a129 = -8.87285693353062954433549289258E0, a1210 = 1.23605671757943030647266201528E1,
                         a1211 = 6.43392746015763530355970484046E-1;
        constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                         bhh3 = 0.220588235294117647058823529412E-01;
        constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                         er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                         er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                         er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

        State k2, k3, k5, k6, k7, k8, k9, k10, ww;
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * a21 * k1[i];
        f(t + c2 * h, ww, k2);
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, ww, k3);
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * (a41 * k1[i] + a43 * k3[i]);
        f(t + c4 * h, ww, k4);
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, ww, k5);
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + c6 * h, ww, k6);
        for (std::size_t i = 0; i < N; ++i) ww[i] = w[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(t + c7 * h, ww, k7);
        for (std::size_t i = 0; i < N; ++i)
            ww[i] = w[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        f(t + c8 * h, ww, k8);
        for (std::size_t i = 0; i < N; ++i)
            ww[i] = w[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i]);
        f(t + c9 * h, ww, k9);
        for (std::size_t i = 0; i < N; ++i)
            ww[i] = w[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                                a108 * k8[i] + a109 * k9[i]);
        f(t + c10 * h, ww, k10);
        for (std::size_t i = 0; i < N; ++i)
            ww[i] = w[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                                a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        f(t + c11 * h, ww, k2);
        for (std::size_t i = 0; i < N; ++i)
            ww[i] = w[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                                a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k2[i]);
        f(t + h, ww, k3);
        for (std::size_t i = 0; i < N; ++i) {
            k4[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k2[i] +
                    b12 * k3[i];
            out[i] = w[i] + h * k4[i];
        }
        double err = 0, err2 = 0;
        int count = 0;
        double pw[2], po[2], p1[2], p2[2];
        for (std::size_t i = 0; i < N; ++i) {
            const T e2 = k4[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k3[i];
            const T e1 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] + er10 * k10[i] +
                         er11 * k2[i] + er12 * k3[i];
            const int m = detail::scalar_parts(w[i], pw);
            detail::scalar_parts(out[i], po);
            detail::scalar_parts(e1, p1);
            detail::scalar_parts(e2, p2);
            for (int j = 0; j < m; ++j) {
                const double sk = 1.0 / (cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(pw[j]), std::fabs(po[j])));
                err += (p1[j] * sk) * (p1[j] * sk);
                err2 += (p2[j] * sk) * (p2[j] * sk);
                ++count;
            }
        }
        const double deno = err + 0.01 * err2;
        return err * std::sqrt(1.0 / (deno <= 0.0 ? count : deno * count));
    }
};

}  // namespace fw
