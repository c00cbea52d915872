#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shrinker/chart.hpp"

namespace shrinker {

/// Closed polygon in R^n.
struct DiscreteCurve {
    int n = 2;
    std::vector<double> points;  // [i][alpha]

    std::size_t size() const { return points.size() / static_cast<std::size_t>(n); }
    const double* point(std::size_t i) const { return points.data() + i * n; }

    double length() const;
    double min_gap() const;
    double max_gap() const;
    /// Three-point curvature vector on the non-uniform polygon, [i][alpha].
    std::vector<double> curvature_vectors() const;
    double sup_curvature2() const;
    /// Signed area of the projection to the first two coordinates.
    double enclosed_area() const;
};

DiscreteCurve circle_curve(double radius, int count, int ambient_dim = 2);
DiscreteCurve ellipse_curve(double a, double b, int count, int ambient_dim = 2);
/// Positions of a periodic one-dimensional chart.
DiscreteCurve curve_from_chart(const SampledChart& chart);

/// Redistributes `count` points uniformly in chord length along a periodic
/// Catmull-Rom interpolant of the polygon.
DiscreteCurve resample(const DiscreteCurve& c, int count);

/// One explicit Euler step F += dt H followed by resampling. Throws
/// BlowupReached when positions become non-finite.
DiscreteCurve step(const DiscreteCurve& c, double dt);

struct StopCriteria {
    std::optional<double> t_max;
    std::optional<double> sup_curvature2;
    long max_steps = 20'000'000;
};

struct FlowOptions {
    double stability_factor = 0.25;
    int monitor_stride = 10;
    int snapshot_stride = 50;  // in monitor samples
};

struct Snapshot {
    double t = 0.0;
    DiscreteCurve curve;
};

struct FlowSeries {
    std::vector<double> times;
    std::vector<double> sup_curvature2;
    std::vector<double> length;
    std::vector<double> area;
    std::vector<Snapshot> snapshots;  // includes first and last state
    long steps = 0;
    std::string stop_reason;
};

FlowSeries run(const DiscreteCurve& initial, const StopCriteria& stop, const FlowOptions& options = {});

struct BlowupFit {
    double T_hat = 0.0;
    double slope = 0.0;          // a in 1/sup|A|^2 ~ a (T - t)
    double fit_residual = 0.0;   // rms of the linear fit
    std::size_t window_begin = 0;
    std::vector<double> type1;   // (T_hat - t) sup|A|^2 per monitor sample
};

/// Least-squares fit over the final `window_fraction` of the monitor samples.
BlowupFit estimate_blowup(const FlowSeries& series, double window_fraction = 1.0 / 3.0);

struct RescaledSnapshot {
    double t = 0.0;
    DiscreteCurve curve;
    double shrinker_residual = 0.0;  // max |H + F^perp| of the rescaled curve
};

/// F / sqrt(2 (T_hat - t)) for every stored snapshot with t < T_hat.
std::vector<RescaledSnapshot> huisken_rescale(const FlowSeries& series, double T_hat);

/// max |H + F^perp| on a discrete curve.
double discrete_shrinker_residual(const DiscreteCurve& c);

/// Symmetric Hausdorff distance using point-to-polygon distances.
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b);

}  // namespace shrinker
