#pragma once
// End-to-end checks: measured front growth against the predicted rate, the pole case,
// and two standalone engines (stationary phase, equidistribution on the 2-torus).
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "assumptions.hpp"
#include "front.hpp"
#include "lambda.hpp"

namespace fw {

struct TheoremOptions {
    double horizon = 500;
    int n_times = 32;
    double t_min = 1;
    double tail_fraction = 0.5;
    double gap_tol = 0.03;
    std::vector<double> extra_horizons;  // evaluated on the same run
    std::optional<Mask> mask;            // also measures the mask and its complement
    FrontOptions front;
    LambdaOptions lambda;
    ActionOptions actions;
    A2Options a2;
};

struct HorizonResult {
    double horizon = 0;
    SlopeEstimate slope;
    double gap = 0;
};

struct SlopeReport {
    SlopeEstimate measured;
    double predicted = 0;
    double lambda_error = 0;
    double relative_gap = 0;
    bool pass = false;
    std::vector<SeriesRow> series;
    std::vector<HorizonResult> horizons;
    LambdaReport lambda;
    A2Report a2;
    FiberReport fiber;
    std::vector<CriticalPoint> critical;
    bool masked = false;
    SlopeEstimate inside, outside;
    double additivity_gap = 0;  // |inside + outside - full| / full
    std::vector<std::string> warnings;
};

SlopeReport verify_theorem(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                           const TheoremOptions& opt = {});

struct PoleOptions {
    int samples = 241;       // time samples on [0, 2 periods]
    double threshold = 0.01;
    FrontOptions front;
};

struct PoleReport {
    double period = 0;
    double max_deviation = 0;  // max_t | |S_t| - |S_{t+period}| | / mean |S_t|
    double mean_length = 0;
    bool pass = false;
    std::vector<SeriesRow> series;
};

PoleReport verify_periodic_pole(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                                const PoleOptions& opt = {});

// phase: polynomial plus trigonometric series in x; amplitude: polynomial times a bump
// exp(1 - 1/(1-u^2)), u = (x - center) / radius
struct OscillatoryProblem {
    std::vector<double> phase_poly;
    std::vector<double> phase_cos, phase_sin;
    std::vector<double> amp_poly{1.0};
    double center = 0, radius = 1;

    double phase(double x, int order = 0) const;
    double amplitude(double x) const;
};

struct CriticalPhasePoint {
    double x = 0;
    double S = 0, S2 = 0;
};

std::vector<CriticalPhasePoint> phase_critical_points(const OscillatoryProblem& p);
std::complex<double> statphase_leading(const OscillatoryProblem& p, double t);
std::complex<double> statphase_direct(const OscillatoryProblem& p, double t, double tol = 1e-10);

struct StatphaseRow {
    double t = 0;
    std::complex<double> direct, leading;
    double gap = 0;
};

struct DecayReport {
    std::vector<StatphaseRow> rows;
    double slope = 0;  // log-log slope of gap (nondegenerate) or |direct| (degenerate)
    bool degenerate = false;
    bool pass = false;
};

// nondegenerate problems: slope of |direct - leading|; otherwise slope of |direct|
DecayReport statphase_decay_rate(const OscillatoryProblem& p, const std::vector<double>& t_grid,
                                 double slope_threshold = -1.3);

// F(s, theta) = sum_j c_j(s) cos(2pi k_j.theta) + d_j(s) sin(2pi k_j.theta), polynomial c_j, d_j
struct FourierMode {
    int k1 = 0, k2 = 0;
    std::vector<double> c, d;
};

struct ErgodicProblem {
    double s0 = 0, s1 = 1;
    TrigPoly v1 = TrigPoly({0.0, 1.0}, {}, 1.0);
    TrigPoly v2 = TrigPoly({}, {1.0}, 1.0);
    std::vector<FourierMode> modes;

    double F(double s, double theta1, double theta2) const;
    double psi(double s) const;  // dominating bound sum |c_j| + |d_j|
};

double ergodic_lhs(const ErgodicProblem& p, double t, double tol = 1e-9);
double ergodic_rhs(const ErgodicProblem& p);
double ergodic_max_abs(const ErgodicProblem& p, int grid = 64);

struct ErgodicRow {
    double t = 0, lhs = 0, error = 0;
};

struct ErgodicReport {
    double rhs = 0;
    double max_F = 0;
    double psi_integral = 0;
    bool hypothesis = true;
    std::string hypothesis_detail;
    std::vector<ErgodicRow> rows;
    double trend = 0;  // log-log slope of the error
    bool pass = false;
};

// two derivative orders of V with independent values at every sampled s
bool ergodic_hypothesis(const ErgodicProblem& p, std::string* detail = nullptr);

ErgodicReport ergodic_convergence(const ErgodicProblem& p, const std::vector<double>& t_grid,
                                  double threshold = 0.05, bool strict = false);

}  // namespace fw
