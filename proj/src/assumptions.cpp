#include "assumptions.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "error.hpp"

namespace fw {

namespace {
constexpr double kPi = std::numbers::pi;
}

A2Report check_A2(const ActionModel& model, const A2Options& opt)
{
    A2Report rep;
    for (const LeafChart& c : model.charts()) {
        const double lo = c.sigma_lo(), hi = c.sigma_hi(), width = hi - lo;
        for (int i = 0; i < opt.samples_per_chart; ++i) {
            const double u = opt.end_margin + (1 - 2 * opt.end_margin) * (i + 0.5) / opt.samples_per_chart;
            const double sg = lo + u * width;
            const double h = std::min(0.02 * width, 0.4 * std::min(sg - lo, hi - sg));
            std::array<std::array<double, 2>, 5> v;
            for (int j = -2; j <= 2; ++j) {
                const Frequencies f = model.frequencies(c, sg + j * h);
                v[j + 2] = {f.nu1, f.nu2};
            }
            std::array<std::array<double, 2>, 5> d{};
            for (int q = 0; q < 2; ++q) {
                const double m2 = v[0][q], m1 = v[1][q], z = v[2][q], p1 = v[3][q], p2 = v[4][q];
                d[1][q] = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
                d[2][q] = (-p2 + 16 * p1 - 30 * z + 16 * m1 - m2) / (12 * h * h);
                d[3][q] = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h);
                d[4][q] = (p2 - 4 * p1 + 6 * z - 4 * m1 + m2) / (h * h * h * h);
            }
            const double nu_norm = std::hypot(v[2][0], v[2][1]);
            auto big = [&](int k) {
                return std::hypot(d[k][0], d[k][1]) * std::pow(width, k) > opt.magnitude_tol * nu_norm;
            };
            A2Sample s;
            s.chart = c.id;
            s.sigma = sg;
            for (int k = 1; k <= opt.max_order && !s.ok; ++k) {
                if (!big(k)) continue;
                for (int l = k + 1; l <= opt.max_order; ++l) {
                    if (!big(l)) continue;
                    const double det = d[k][0] * d[l][1] - d[k][1] * d[l][0];
                    const double nk = std::hypot(d[k][0], d[k][1]), nl = std::hypot(d[l][0], d[l][1]);
                    if (std::fabs(det) > opt.independence_tol * nk * nl) {
                        s.ok = true;
                        s.k = k;
                        s.l = l;
                        break;
                    }
                }
            }
            rep.samples.push_back(s);
            if (!s.ok) {
                rep.ok = false;
                rep.failures.push_back(s);
            }
        }
    }
    return rep;
}

TypeLFit typeL_fit(const ActionModel& model, const LeafChart& c, int n_points, double x_min, double x_max)
{
    if (model.flat()) throw Error(ErrorCode::WrongBoundary, "the flat torus has no hyperbolic leaves");
    TypeLFit fit;
    fit.chart = c.id;
    if (c.lo_tag == EndTag::Hyperbolic) {
        fit.crit = c.lo_crit;
        fit.eps = 1;
    } else if (c.hi_tag == EndTag::Hyperbolic) {
        fit.crit = c.hi_crit;
        fit.eps = -1;
    } else {
        throw Error(ErrorCode::WrongBoundary, "chart " + std::to_string(c.id) + " has no hyperbolic end");
    }
    if (n_points < 4 || !(x_min > 0) || !(x_max > x_min)) throw Error(ErrorCode::Precondition, "bad fit sampling");
    Eigen::MatrixXd M(n_points, 3);
    Eigen::VectorXd b(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double x = x_min * std::pow(x_max / x_min, double(i) / (n_points - 1));
        const double p2 = model.action_p2(c, model.level_near(fit.crit, x / kAngleUnit, fit.eps));
        fit.x.push_back(x);
        fit.p2.push_back(p2);
        M(i, 0) = x * std::log(x) / x_max;
        M(i, 1) = x / x_max;
        M(i, 2) = 1;
        b(i) = p2;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    qr.setThreshold(1e-12);
    if (qr.rank() < 3) throw Error(ErrorCode::FitDegenerate, "design matrix is rank deficient");
    const Eigen::VectorXd coef = qr.solve(b);
    fit.c1 = coef(0) / x_max;
    fit.c2 = coef(1) / x_max;
    fit.c3 = coef(2);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < n_points; ++i) {
        const double x = fit.x[i];
        const double model_v = fit.c1 * x * std::log(x) + fit.c2 * x + fit.c3;
        fit.residual = std::max(fit.residual, std::fabs(model_v - fit.p2[i]));
        lo = std::min(lo, fit.p2[i]);
        hi = std::max(hi, fit.p2[i]);
    }
    fit.data_range = hi - lo;
    return fit;
}

FiberReport check_A3_A4(const ActionModel& model, const SurfacePoint& A)
{
    FiberReport rep;
    if (model.flat()) {
        rep.detail = "flat torus: no singular leaves; omega -> sigma is a diffeomorphism";
        return rep;
    }
    const SurfaceModel& surface = model.surface();
    if (surface.near_pole(A.s)) {
        rep.degenerate = true;
        rep.a4 = false;
        rep.detail = "fiber over a pole lies in the single leaf p_theta = 0";
        return rep;
    }
    const double pA = model.effective().P(A.s);
    rep.critical = {0.0, kPi};
    for (const auto& cp : model.critical_points()) {
        if (cp.P > pA * (1 + 1e-12)) continue;
        const double ratio = std::min(1.0, cp.P / pA);
        const double w = std::acos(ratio);
        std::vector<double> hits = {w, 2 * kPi - w, kPi - w, kPi + w};
        if (ratio >= 1 - 1e-12) hits = {0.0, kPi};
        for (double h : hits) {
            h = std::fmod(h + 2 * kPi, 2 * kPi);
            auto& dst = cp.hyperbolic ? rep.z_hits : rep.elliptic_hits;
            bool dup = false;
            for (double e : dst) dup |= std::fabs(e - h) < 1e-12;
            if (!dup) dst.push_back(h);
        }
        if (cp.hyperbolic && ratio >= 1 - 1e-9) {
            rep.a3 = false;
            rep.a4 = false;
            rep.detail = "fiber is tangent to a hyperbolic singular leaf";
        }
    }
    std::sort(rep.z_hits.begin(), rep.z_hits.end());
    std::sort(rep.elliptic_hits.begin(), rep.elliptic_hits.end());
    if (rep.detail.empty()) rep.detail = "transverse to all hyperbolic leaves; two nondegenerate critical points";
    return rep;
}

}  // namespace fw
