#include "shrinker/flow_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace {

double dist(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

// Distance from q to segment [a, b].
double segment_distance(const double* q, const double* a, const double* b, int n) {
    double ab2 = 0.0, t = 0.0;
    for (int k = 0; k < n; ++k) {
        ab2 += (b[k] - a[k]) * (b[k] - a[k]);
        t += (q[k] - a[k]) * (b[k] - a[k]);
    }
    t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = q[k] - (a[k] + t * (b[k] - a[k]));
        s += d * d;
    }
    return std::sqrt(s);
}

double directed_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    const std::size_t N = b.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < N; ++j)
            best = std::min(best, segment_distance(a.point(i), b.point(j), b.point((j + 1) % N), a.n));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double DiscreteCurve::length() const {
    const std::size_t N = size();
    double L = 0.0;
    for (std::size_t i = 0; i < N; ++i) L += dist(point(i), point((i + 1) % N), n);
    return L;
}

double DiscreteCurve::min_gap() const {
    const std::size_t N = size();
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) g = std::min(g, dist(point(i), point((i + 1) % N), n));
    return g;
}

double DiscreteCurve::max_gap() const {
    const std::size_t N = size();
    double g = 0.0;
    for (std::size_t i = 0; i < N; ++i) g = std::max(g, dist(point(i), point((i + 1) % N), n));
    return g;
}

std::vector<double> DiscreteCurve::curvature_vectors() const {
    const std::size_t N = size();
    std::vector<double> H(points.size());
    for (std::size_t i = 0; i < N; ++i) {
        const double* xm = point((i + N - 1) % N);
        const double* x = point(i);
        const double* xp = point((i + 1) % N);
        const double a = dist(x, xm, n), b = dist(xp, x, n);
        for (int k = 0; k < n; ++k) H[i * n + k] = 2.0 * ((xp[k] - x[k]) / b - (x[k] - xm[k]) / a) / (a + b);
    }
    return H;
}

double DiscreteCurve::sup_curvature2() const {
    const auto H = curvature_vectors();
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double h2 = 0.0;
        for (int k = 0; k < n; ++k) h2 += H[i * n + k] * H[i * n + k];
        s = std::max(s, h2);
    }
    return s;
}

double DiscreteCurve::enclosed_area() const {
    const std::size_t N = size();
    double a = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double* p = point(i);
        const double* q = point((i + 1) % N);
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

DiscreteCurve ellipse_curve(double a, double b, int count, int ambient_dim) {
    if (count < 8 || ambient_dim < 2) throw ConfigError("curve needs at least 8 points in dimension >= 2");
    DiscreteCurve c;
    c.n = ambient_dim;
    c.points.assign(static_cast<std::size_t>(count) * ambient_dim, 0.0);
    for (int i = 0; i < count; ++i) {
        const double t = 2.0 * std::numbers::pi * i / count;
        c.points[i * ambient_dim] = a * std::cos(t);
        c.points[i * ambient_dim + 1] = b * std::sin(t);
    }
    return resample(c, count);
}

DiscreteCurve circle_curve(double radius, int count, int ambient_dim) {
    return ellipse_curve(radius, radius, count, ambient_dim);
}

DiscreteCurve curve_from_chart(const SampledChart& chart) {
    if (chart.m != 1 || !chart.grid.all_periodic()) throw ConfigError("flow needs a closed curve chart");
    DiscreteCurve c;
    c.n = chart.n;
    c.points = chart.F;
    return c;
}

DiscreteCurve resample(const DiscreteCurve& c, int count) {
    const std::size_t N = c.size();
    const int n = c.n;
    std::vector<double> cum(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) cum[i + 1] = cum[i] + dist(c.point(i), c.point((i + 1) % N), n);
    const double L = cum[N];
    DiscreteCurve out;
    out.n = n;
    out.points.resize(static_cast<std::size_t>(count) * n);
    std::size_t seg = 0;
    for (int j = 0; j < count; ++j) {
        const double t = L * j / count;
        while (seg + 1 < N && cum[seg + 1] <= t) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double u = len > 0.0 ? (t - cum[seg]) / len : 0.0;
        const double* P0 = c.point((seg + N - 1) % N);
        const double* P1 = c.point(seg);
        const double* P2 = c.point((seg + 1) % N);
        const double* P3 = c.point((seg + 2) % N);
        const double u2 = u * u, u3 = u2 * u;
        for (int k = 0; k < n; ++k)
            out.points[j * n + k] =
                0.5 * (2.0 * P1[k] + (-P0[k] + P2[k]) * u + (2.0 * P0[k] - 5.0 * P1[k] + 4.0 * P2[k] - P3[k]) * u2 +
                       (-P0[k] + 3.0 * P1[k] - 3.0 * P2[k] + P3[k]) * u3);
    }
    return out;
}

DiscreteCurve step(const DiscreteCurve& c, double dt) {
    const auto H = c.curvature_vectors();
    DiscreteCurve next = c;
    for (std::size_t i = 0; i < next.points.size(); ++i) {
        next.points[i] += dt * H[i];
        if (!std::isfinite(next.points[i])) throw BlowupReached("non-finite position during flow step");
    }
    return resample(next, static_cast<int>(c.size()));
}

FlowSeries run(const DiscreteCurve& initial, const StopCriteria& stop, const FlowOptions& o) {
    FlowSeries s;
    DiscreteCurve cur = initial;
    double t = 0.0;
    long monitors = 0;
    auto monitor = [&](bool force_snapshot) {
        const double k2 = cur.sup_curvature2();
        s.times.push_back(t);
        s.sup_curvature2.push_back(k2);
        s.length.push_back(cur.length());
        s.area.push_back(cur.enclosed_area());
        if (force_snapshot || monitors % o.snapshot_stride == 0) s.snapshots.push_back({t, cur});
        ++monitors;
        return k2;
    };
    monitor(true);
    try {
        while (true) {
            if (s.steps >= stop.max_steps) {
                s.stop_reason = "max_steps";
                break;
            }
            double dt = o.stability_factor * std::pow(cur.min_gap(), 2);
            bool last = false;
            if (stop.t_max && t + dt >= *stop.t_max) {
                dt = *stop.t_max - t;
                last = true;
            }
            cur = step(cur, dt);
            t += dt;
            ++s.steps;
            const bool due = s.steps % o.monitor_stride == 0;
            if (last) {
                monitor(true);
                s.stop_reason = "time";
                break;
            }
            if (stop.sup_curvature2 || due) {
                const double k2 = cur.sup_curvature2();
                if (stop.sup_curvature2 && k2 >= *stop.sup_curvature2) {
                    monitor(true);
                    s.stop_reason = "curvature";
                    break;
                }
                if (due) monitor(false);
            }
        }
    } catch (const BlowupReached&) {
        s.stop_reason = "blowup";
        if (s.snapshots.empty() || s.snapshots.back().t != s.times.back()) s.snapshots.push_back({s.times.back(), cur});
    }
    return s;
}

BlowupFit estimate_blowup(const FlowSeries& s, double window_fraction) {
    const std::size_t N = s.times.size();
    if (N < 10) throw NoBlowupError("fewer than 10 monitor samples");
    BlowupFit fit;
    fit.window_begin = N - std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(window_fraction * N)));
    const std::size_t b = fit.window_begin;
    if (!(s.sup_curvature2.back() > s.sup_curvature2[b]))
        throw NoBlowupError("sup|A|^2 is not increasing over the fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(N - b);
    for (std::size_t i = b; i < N; ++i) {
        const double x = s.times[i], y = 1.0 / s.sup_curvature2[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / k;
    if (!(slope < 0.0)) throw NoBlowupError("1/sup|A|^2 does not decrease; no finite-time blow-up");
    fit.slope = -slope;
    fit.T_hat = icpt / fit.slope;
    double r2 = 0.0;
    for (std::size_t i = b; i < N; ++i) {
        const double e = 1.0 / s.sup_curvature2[i] - (icpt + slope * s.times[i]);
        r2 += e * e;
    }
    fit.fit_residual = std::sqrt(r2 / k);
    fit.type1.resize(N);
    for (std::size_t i = 0; i < N; ++i) fit.type1[i] = (fit.T_hat - s.times[i]) * s.sup_curvature2[i];
    return fit;
}

double discrete_shrinker_residual(const DiscreteCurve& c) {
    const std::size_t N = c.size();
    const int n = c.n;
    const auto H = c.curvature_vectors();
    std::vector<double> T(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double* xm = c.point((i + N - 1) % N);
        const double* xp = c.point((i + 1) % N);
        const double len = dist(xp, xm, n);
        double ft = 0.0;
        for (int k = 0; k < n; ++k) {
            T[k] = (xp[k] - xm[k]) / len;
            ft += c.point(i)[k] * T[k];
        }
        double r = 0.0;
        for (int k = 0; k < n; ++k) {
            const double v = H[i * n + k] + c.point(i)[k] - ft * T[k];
            r += v * v;
        }
        worst = std::max(worst, std::sqrt(r));
    }
    return worst;
}

std::vector<RescaledSnapshot> huisken_rescale(const FlowSeries& s, double T_hat) {
    std::vector<RescaledSnapshot> out;
    for (const auto& snap : s.snapshots) {
        if (!(snap.t < T_hat)) continue;
        RescaledSnapshot r;
        r.t = snap.t;
        r.curve = snap.curve;
        const double scale = 1.0 / std::sqrt(2.0 * (T_hat - snap.t));
        for (double& v : r.curve.points) v *= scale;
        r.shrinker_residual = discrete_shrinker_residual(r.curve);
        out.push_back(std::move(r));
    }
    return out;
}

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace shrinker
