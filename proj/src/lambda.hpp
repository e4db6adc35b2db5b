#pragma once
// Growth-rate integral: sum over leaf charts of N_A(sigma) * |D Psi . d nu / d sigma|.
#include <vector>

#include "actions.hpp"

namespace fw {

struct LambdaOptions {
    bool reparametrize = false;  // integrate in tau with sigma = a + (b-a)(tau^3+tau)/2
    double rel_tol = 1e-9;
    double tail_rel = 1e-4;      // final tail estimate relative to lambda
    double y_direct = 36;        // beyond this the log-chart asymptotics are used
    double end_fraction = 1e-2;  // size of the end zone relative to the chart width
};

struct TailReport {
    int chart = 0;
    int crit = 0;
    int eps = 0;
    int N = 0;
    double y_start = 0;
    double value = 0;                    // contribution of the end zone, closure included
    std::vector<double> estimates;       // tail estimate after each subdivision step
    double closure = 0;
};

struct ChartContribution {
    int chart = 0;
    double value = 0;
    double error = 0;
};

struct LambdaReport {
    double lambda = 0;
    double error_estimate = 0;
    double closure_total = 0;
    std::vector<ChartContribution> charts;
    std::vector<TailReport> tails;
};

LambdaReport compute_lambda(const ActionModel& model, const SurfacePoint& A, const LambdaOptions& opt = {});

struct ProfileRow {
    int chart = 0;
    double sigma = 0, p1 = 0, p2 = 0, nu1 = 0, nu2 = 0, density = 0;
    int N = 0;
};
std::vector<ProfileRow> chart_profile(const ActionModel& model, const SurfacePoint& A, int per_chart);

}  // namespace fw
