#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shrinker/chart.hpp"

namespace shrinker {

/// Arclength-parametrized state of a self-shrinking plane curve.
struct PlanarCurveState {
    double s = 0.0;
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;  // tangent angle
    double k = 0.0;    // curvature

    /// k exp(-|F|^2/2), constant along solutions.
    double conserved() const;
    double position_dot_tangent() const;
};

/// d/ds of (x, y, phi, k).
std::array<double, 4> al_rhs(const PlanarCurveState& st);

/// State at a curvature critical point with curvature k0: F = (k0, 0), T = (0, 1).
PlanarCurveState al_initial_state(double k0);

struct Trajectory {
    std::vector<PlanarCurveState> states;  // accepted steps
    double c_gamma = 0.0;
    double max_drift = 0.0;
};

/// Adaptive Dormand-Prince integration over [0, length]. Throws IntegratorError
/// when the conserved quantity drifts more than 100 rel_tol per unit length.
Trajectory integrate(double k0, double length, double rel_tol = 1e-12);

/// Roots k_- <= 1 <= k_+ of k exp(-k^2/2) = c.
std::pair<double, double> critical_values(double c);

/// Arclength positions of the interior curvature extrema along a trajectory,
/// located as sign changes of <F, T> and refined by bisection.
std::vector<PlanarCurveState> curvature_extrema(double k0, double length, double rel_tol = 1e-12);

struct PeriodInfo {
    double k0 = 0.0;
    double k_partner = 0.0;   // other critical curvature
    double period = 0.0;      // arclength of one full curvature oscillation
    double delta_phi = 0.0;   // tangent angle swept per period
    double rotation_ratio() const;
};

/// One curvature period starting at the critical point k0. The circle
/// (k0 = 1) has period 2 pi and ratio 1.
PeriodInfo curve_period(double k0, double rel_tol = 1e-12);

struct Rational {
    long p = 0;
    long q = 1;
    double error = 0.0;
};

/// Continued-fraction best approximation with denominator at most max_den.
Rational best_rational(double x, long max_den);

struct ClosedCurveResult {
    double k0 = 0.0;
    double c_gamma = 0.0;
    double period = 0.0;       // single curvature period
    double length = 0.0;       // q periods
    Rational rotation;         // delta_phi / 2 pi = p / q
    double closure_defect = 0.0;
    double conserved_drift = 0.0;
    std::vector<PlanarCurveState> samples;
};

/// Closure check: integrate q curvature periods and compare end to start.
ClosedCurveResult close_curve(double k0, long q, double rel_tol = 1e-12, int sample_count = 256);

struct ClosedSearchOptions {
    int samples = 64;
    double closure_tol = 1e-6;
    long max_den = 20;
    double rel_tol = 1e-12;
};

/// Closed curves with critical curvature in [lo, hi]: bracket rational
/// rotation ratios between samples and bisect k0 onto them. Includes the
/// circle when 1 lies in the range.
std::vector<ClosedCurveResult> find_closed(double lo, double hi, const ClosedSearchOptions& options = {});

/// The closed curve whose rotation ratio is the fraction with denominator
/// <= max_den nearest to that of k0.
ClosedCurveResult nearest_closed(double k0, long max_den = 10, double rel_tol = 1e-12);

/// States at arbitrary arclengths (negative ones by the reflection symmetry
/// through the starting critical point).
std::vector<PlanarCurveState> sample_states(double k0, const std::vector<double>& s, double rel_tol = 1e-12);

/// Chart on a truncated arclength axis [lo, hi]; derivatives from the ODE.
SampledChart al_arc_chart(double k0, double lo, double hi, int interior_count, double rel_tol = 1e-12);

/// Periodic chart of a closed curve of length `length` starting at the critical point k0.
SampledChart al_closed_chart(double k0, double length, int count, double rel_tol = 1e-12);

struct EmbedResult {
    SampledChart chart;
    std::optional<std::string> warning;
};

/// Maps a plane-curve chart into R^n: F -> R (F, 0) + t with R orthogonal.
EmbedResult embed(const SampledChart& curve, int target_dim, const std::vector<double>& rotation,
                  const std::vector<double>& translation);

}  // namespace shrinker
