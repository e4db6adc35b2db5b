#pragma once
// The flowed fiber over a point: an adaptively refined ensemble of trajectories whose
// tangents give the g-length of the front at any time.
#include <memory>
#include <string>
#include <vector>

#include "dop853.hpp"
#include "dual.hpp"
#include "effective.hpp"
#include "flow.hpp"
#include "geometry.hpp"

namespace fw {

struct FrontOptions {
    int n0 = 64;                 // initial samples on the fiber circle
    double tol = 1e-3;           // refinement target relative to the length
    double checkpoint_dt = 10;   // upper bound for the spacing of refinement stops
    long max_samples = 400000;
    bool windows = true;         // log-chart windows around separatrix directions
    double window_x0 = 1e-3;
    double window_panel = 4.0;   // initial panel width in the log chart
    double window_margin = 60;
    double y_cap = 1300;
    IntegratorConfig integ{1e-11, 1e-12, 1.0, 50000000};
};

struct Mask {
    double theta_lo = 0, theta_hi = 0, s_lo = 0, s_hi = 0;
    bool complement = false;
    bool contains(const SurfacePoint& p) const
    {
        const bool in = p.theta >= theta_lo && p.theta <= theta_hi && p.s >= s_lo && p.s <= s_hi;
        return in != complement;
    }
};

class Front {
public:
    Front(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A, const FrontOptions& opt = {});
    ~Front();
    Front(const Front&) = delete;
    Front& operator=(const Front&) = delete;

    void evolve(double t);
    double time() const;
    double length() const;
    double length(const Mask& mask) const;
    long refined() const;
    double max_panel_error() const;
    long sample_count() const;
    int window_count() const;
    bool pole_start() const;
    // integrand at the last window sample per unit log-chart length, summed over windows
    double truncation_estimate() const;
    std::vector<SurfacePoint> positions() const;
    // chord sum over consecutive samples, a cross-check that ignores the tangents
    double polyline_length() const;
    // length carried by each segment: regular arcs, separatrix windows, pole cover
    std::vector<std::pair<std::string, double>> segment_lengths() const;
    const std::vector<std::string>& warnings() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct SeriesRow {
    double t = 0;
    double length = 0;
    long refined = 0;
    double max_pair_error = 0;
    std::vector<double> masked;  // one entry per mask
};

std::vector<SeriesRow> length_series(const HamiltonianModel& H, const SurfaceModel& surface, const SurfacePoint& A,
                                     const std::vector<double>& times, const FrontOptions& opt = {},
                                     const std::vector<Mask>& masks = {});

std::vector<double> log_spaced_times(double t_min, double t_max, int n);

struct SlopeEstimate {
    double slope = 0;
    double intercept = 0;
    double uncertainty = 0;
    int n_used = 0;
    double t_from = 0, t_to = 0;
};

SlopeEstimate slope_estimate(const std::vector<SeriesRow>& series, double tail_fraction = 0.5);

}  // namespace fw
