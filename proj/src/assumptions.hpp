#pragma once
// Checks of the structural hypotheses behind the growth-rate formula.
#include <string>
#include <vector>

#include "actions.hpp"

namespace fw {

struct A2Sample {
    int chart = 0;
    double sigma = 0;
    int k = 0, l = 0;  // first independent pair of derivative orders, 0 if none
    bool ok = false;
};

struct A2Report {
    bool ok = true;
    std::vector<A2Sample> samples;
    std::vector<A2Sample> failures;
};

struct A2Options {
    int samples_per_chart = 8;
    int max_order = 4;
    double independence_tol = 1e-3;  // |det| / (|a||b|)
    double magnitude_tol = 1e-4;     // |nu^(k)| width^k / |nu|
    double end_margin = 0.05;
};

A2Report check_A2(const ActionModel& model, const A2Options& opt = {});

struct TypeLFit {
    int chart = 0;
    int crit = 0;
    int eps = 0;
    double c1 = 0, c2 = 0, c3 = 0;
    double residual = 0;    // max |fit - data|
    double data_range = 0;  // max - min of the data
    std::vector<double> x, p2;
};

// fits p2 = c1 x log x + c2 x + c3 near the hyperbolic end of a chart; x is the distance
// of p1 from its separatrix value
TypeLFit typeL_fit(const ActionModel& model, const LeafChart& c, int n_points = 24, double x_min = 1e-9,
                   double x_max = 1e-5);

struct FiberReport {
    bool degenerate = false;  // the fiber maps to a single leaf (pole start)
    std::vector<double> z_hits;        // omegas on hyperbolic singular leaves
    std::vector<double> elliptic_hits; // omegas on elliptic singular leaves
    std::vector<double> critical;      // critical points of omega -> sigma
    bool a3 = true;
    bool a4 = true;
    std::string detail;
};

FiberReport check_A3_A4(const ActionModel& model, const SurfacePoint& A);

}  // namespace fw
