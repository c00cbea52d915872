#include "shrinker/abresch_langer.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shrinker/errors.hpp"

namespace shrinker {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 4>;  // x, y, phi, k
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kCircleConserved = std::exp(-0.5);

struct System {
    void operator()(const State& u, State& du, double /*s*/) const {
        const double c = std::cos(u[2]), s = std::sin(u[2]);
        du[0] = c;
        du[1] = s;
        du[2] = u[3];
        du[3] = u[3] * (u[0] * c + u[1] * s);
    }
};

PlanarCurveState to_state(const State& u, double s) { return {s, u[0], u[1], u[2], u[3]}; }
State to_array(const PlanarCurveState& st) { return {st.x, st.y, st.phi, st.k}; }

auto make_stepper(double rel_tol) {
    return odeint::make_controlled(rel_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
}

// Advance u from s0 to exactly s1.
State advance(State u, double s0, double s1, double rel_tol) {
    if (s1 == s0) return u;
    auto stepper = make_stepper(rel_tol);
    odeint::integrate_adaptive(stepper, System{}, u, s0, s1, (s1 - s0) / 16.0);
    return u;
}

bool is_circle(double k0) { return std::abs(k0 - 1.0) < 1e-12; }

double g_of(const State& u) { return u[0] * std::cos(u[2]) + u[1] * std::sin(u[2]); }

// Walks accepted steps from the start, calling on_crossing at every refined
// zero of <F, T> (the start itself excluded) until it returns false or s
// exceeds length.
template <class OnCrossing>
void scan_extrema(double k0, double length, double rel_tol, OnCrossing on_crossing) {
    auto stepper = make_stepper(rel_tol);
    State u = to_array(al_initial_state(k0));
    double s = 0.0, ds = 0.01;
    // Sign just after the start: g'(0) = 1 - k0^2.
    double g_prev = 1.0 - k0 * k0;
    if (g_prev == 0.0) return;
    while (s < length) {
        const State u_prev = u;
        const double s_prev = s;
        ds = std::min(ds, length - s);
        if (stepper.try_step(System{}, u, s, ds) != odeint::success) continue;
        const double g = g_of(u);
        if ((g_prev > 0.0 && g <= 0.0) || (g_prev < 0.0 && g >= 0.0)) {
            double a = s_prev, b = s;
            const double ga = g_prev;
            while (b - a > 1e-13) {
                const double mid = 0.5 * (a + b);
                const double gm = g_of(advance(u_prev, s_prev, mid, rel_tol));
                if ((gm > 0.0) == (ga > 0.0)) a = mid;
                else b = mid;
            }
            const double root = 0.5 * (a + b);
            if (!on_crossing(to_state(advance(u_prev, s_prev, root, rel_tol), root))) return;
        }
        if (g != 0.0) g_prev = g;
    }
}

}  // namespace

double PlanarCurveState::conserved() const { return k * std::exp(-0.5 * (x * x + y * y)); }

double PlanarCurveState::position_dot_tangent() const { return x * std::cos(phi) + y * std::sin(phi); }

std::array<double, 4> al_rhs(const PlanarCurveState& st) {
    State du;
    System{}(to_array(st), du, st.s);
    return du;
}

PlanarCurveState al_initial_state(double k0) {
    if (!(k0 > 0.0)) throw ConfigError("critical curvature k0 must be positive");
    return {0.0, k0, 0.0, std::numbers::pi / 2.0, k0};
}

Trajectory integrate(double k0, double length, double rel_tol) {
    Trajectory tr;
    State u = to_array(al_initial_state(k0));
    tr.c_gamma = to_state(u, 0.0).conserved();
    tr.states.push_back(to_state(u, 0.0));
    auto stepper = make_stepper(rel_tol);
    double s = 0.0, ds = 0.01;
    while (s < length) {
        ds = std::min(ds, length - s);
        if (stepper.try_step(System{}, u, s, ds) != odeint::success) continue;
        const auto st = to_state(u, s);
        tr.states.push_back(st);
        const double drift = std::abs(st.conserved() - tr.c_gamma);
        tr.max_drift = std::max(tr.max_drift, drift);
        if (!(drift <= 100.0 * rel_tol * std::max(1.0, s)) || !(st.k > 0.0))
            throw IntegratorError("conserved quantity drifted by " + std::to_string(drift) + " at s = " +
                                  std::to_string(s));
    }
    return tr;
}

std::pair<double, double> critical_values(double c) {
    if (!(c > 0.0)) throw NoRootError("k exp(-k^2/2) = c needs c > 0");
    if (c > kCircleConserved * (1.0 + 1e-15))
        throw NoRootError("k exp(-k^2/2) = c has no root for c > exp(-1/2)");
    if (c >= kCircleConserved * (1.0 - 1e-15)) return {1.0, 1.0};
    auto f = [c](double k) { return k * std::exp(-0.5 * k * k) - c; };
    auto bisect = [&](double a, double b) {
        // f(a) and f(b) have opposite signs.
        const bool fa_pos = f(a) > 0.0;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
            const double mid = 0.5 * (a + b);
            if ((f(mid) > 0.0) == fa_pos) a = mid;
            else b = mid;
        }
        return 0.5 * (a + b);
    };
    double hi = 2.0;
    while (f(hi) > 0.0) hi *= 2.0;
    return {bisect(0.0, 1.0), bisect(1.0, hi)};
}

std::vector<PlanarCurveState> curvature_extrema(double k0, double length, double rel_tol) {
    std::vector<PlanarCurveState> out;
    if (is_circle(k0)) return out;
    scan_extrema(k0, length, rel_tol, [&](const PlanarCurveState& st) {
        out.push_back(st);
        return true;
    });
    return out;
}

double PeriodInfo::rotation_ratio() const { return delta_phi / kTwoPi; }

PeriodInfo curve_period(double k0, double rel_tol) {
    PeriodInfo info;
    info.k0 = k0;
    if (is_circle(k0)) {
        info.k_partner = 1.0;
        info.period = kTwoPi;
        info.delta_phi = kTwoPi;
        return info;
    }
    int crossings = 0;
    scan_extrema(k0, 1e3, rel_tol, [&](const PlanarCurveState& st) {
        ++crossings;
        if (crossings == 1) info.k_partner = st.k;
        if (crossings == 2) {
            info.period = st.s;
            info.delta_phi = st.phi - std::numbers::pi / 2.0;
            return false;
        }
        return true;
    });
    if (crossings < 2) throw IntegratorError("no curvature period found for k0 = " + std::to_string(k0));
    return info;
}

Rational best_rational(double x, long max_den) {
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    Rational best{std::lround(x), 1, std::abs(x - std::round(x))};
    for (int it = 0; it < 64; ++it) {
        const double a_real = std::floor(r);
        const long a = static_cast<long>(a_real);
        const long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) {
            const long t = (max_den - q0) / q1;
            if (t > 0) {
                const long ps = t * p1 + p0, qs = t * q1 + q0;
                const double es = std::abs(x - static_cast<double>(ps) / qs);
                if (es < best.error) best = {ps, qs, es};
            }
            break;
        }
        const double e = std::abs(x - static_cast<double>(p2) / q2);
        if (e < best.error || (e == best.error && q2 < best.q)) best = {p2, q2, e};
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = r - a_real;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return best;
}

ClosedCurveResult close_curve(double k0, long q, double rel_tol, int sample_count) {
    const auto info = curve_period(k0, rel_tol);
    ClosedCurveResult res;
    res.k0 = k0;
    res.c_gamma = al_initial_state(k0).conserved();
    res.period = info.period;
    res.length = static_cast<double>(q) * info.period;
    const auto tr = integrate(k0, res.length, rel_tol);
    res.conserved_drift = tr.max_drift;
    const auto& end = tr.states.back();
    const double turns = (end.phi - std::numbers::pi / 2.0) / kTwoPi;
    const long p = std::lround(turns);
    const long g = std::gcd(p, q);
    res.rotation = {p / std::max(g, 1L), q / std::max(g, 1L), std::abs(info.rotation_ratio() - double(p) / double(q))};
    const double dpos = std::hypot(end.x - k0, end.y);
    const double dang = std::abs(end.phi - std::numbers::pi / 2.0 - kTwoPi * double(p));
    res.closure_defect = std::max(dpos, dang);
    std::vector<double> s(sample_count);
    for (int i = 0; i < sample_count; ++i) s[i] = res.length * i / sample_count;
    res.samples = sample_states(k0, s, rel_tol);
    return res;
}

namespace {

// k0 with rotation ratio exactly target inside [a, b] (ratio - target changes sign).
double bisect_ratio(double a, double b, double target, double rel_tol) {
    double fa = curve_period(a, rel_tol).rotation_ratio() - target;
    for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = curve_period(mid, rel_tol).rotation_ratio() - target;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<ClosedCurveResult> find_closed(double lo, double hi, const ClosedSearchOptions& o) {
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("find_closed needs 0 < lo < hi");
    if (o.samples < 8) throw ConfigError("find_closed needs at least 8 samples");
    std::vector<ClosedCurveResult> out;
    const double top = std::min(hi, 0.999);
    if (lo < top) {
        std::vector<double> ks(o.samples), rho(o.samples);
        for (int i = 0; i < o.samples; ++i) {
            ks[i] = lo + (top - lo) * i / (o.samples - 1);
            rho[i] = curve_period(ks[i], o.rel_tol).rotation_ratio();
        }
        std::vector<std::pair<long, long>> seen;
        for (int i = 0; i + 1 < o.samples; ++i) {
            const double r0 = std::min(rho[i], rho[i + 1]), r1 = std::max(rho[i], rho[i + 1]);
            for (long q = 1; q <= o.max_den; ++q)
                for (long p = static_cast<long>(std::ceil(r0 * q)); double(p) / q <= r1; ++p) {
                    if (std::gcd(p, q) != 1) continue;
                    const double target = double(p) / double(q);
                    if (target < r0 || target > r1) continue;
                    if (std::find(seen.begin(), seen.end(), std::make_pair(p, q)) != seen.end()) continue;
                    seen.emplace_back(p, q);
                    const double k = bisect_ratio(ks[i], ks[i + 1], target, o.rel_tol);
                    auto res = close_curve(k, q, o.rel_tol);
                    if (res.closure_defect <= o.closure_tol) out.push_back(std::move(res));
                }
        }
    }
    if (lo <= 1.0 && hi >= 1.0) out.push_back(close_curve(1.0, 1, o.rel_tol));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k0 < b.k0; });
    return out;
}

ClosedCurveResult nearest_closed(double k0, long max_den, double rel_tol) {
    if (is_circle(k0)) return close_curve(1.0, 1, rel_tol);
    const double r = curve_period(k0, rel_tol).rotation_ratio();
    const Rational target = best_rational(r, max_den);
    const double t = double(target.p) / double(target.q);
    if (std::abs(r - t) < 1e-15) return close_curve(k0, target.q, rel_tol);
    // Expand a bracket around k0 until the ratio crosses the target.
    double a = k0, b = k0, step = 0.01;
    const double fa = r - t;
    for (int it = 0; it < 40; ++it) {
        const double left = std::max(1e-3, k0 - step), right = std::min(0.9999, k0 + step);
        if ((curve_period(left, rel_tol).rotation_ratio() - t > 0.0) != (fa > 0.0)) {
            a = left;
            b = k0;
            break;
        }
        if (k0 < 1.0 && (curve_period(right, rel_tol).rotation_ratio() - t > 0.0) != (fa > 0.0)) {
            a = k0;
            b = right;
            break;
        }
        step *= 1.5;
    }
    if (a == b) throw NoRootError("no closed curve with rotation " + std::to_string(target.p) + "/" +
                                  std::to_string(target.q) + " near k0 = " + std::to_string(k0));
    return close_curve(bisect_ratio(a, b, t, rel_tol), target.q, rel_tol);
}

std::vector<PlanarCurveState> sample_states(double k0, const std::vector<double>& s, double rel_tol) {
    std::vector<double> times;
    for (double v : s) times.push_back(std::abs(v));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.empty() || times.front() != 0.0) times.insert(times.begin(), 0.0);
    std::vector<State> at(times.size());
    State u = to_array(al_initial_state(k0));
    auto stepper = make_stepper(rel_tol);
    std::size_t idx = 0;
    odeint::integrate_times(stepper, System{}, u, times.begin(), times.end(), 0.01,
                            [&](const State& x, double) { at[idx++] = x; });
    std::vector<PlanarCurveState> out;
    out.reserve(s.size());
    for (double v : s) {
        const auto it = std::lower_bound(times.begin(), times.end(), std::abs(v));
        const State& x = at[static_cast<std::size_t>(it - times.begin())];
        if (v >= 0.0) out.push_back(to_state(x, v));
        // Reflection y -> -y with reversed orientation maps the solution to itself.
        else out.push_back({v, x[0], -x[1], std::numbers::pi - x[2], x[3]});
    }
    return out;
}

namespace {

SampledChart chart_from_states(const ParameterGrid& grid, const std::vector<PlanarCurveState>& st) {
    SampledChart c;
    c.grid = grid;
    c.m = 1;
    c.n = 2;
    c.source = DerivativeSource::analytic;
    c.has_third = true;
    const std::size_t N = grid.size();
    c.F.resize(2 * N);
    c.dF.resize(2 * N);
    c.d2F.resize(2 * N);
    c.d3F.resize(2 * N);
    for (std::size_t p = 0; p < N; ++p) {
        const auto& u = st[p];
        const double T[2] = {std::cos(u.phi), std::sin(u.phi)};
        const double Nv[2] = {-T[1], T[0]};
        const double kp = u.k * u.position_dot_tangent();
        for (int a = 0; a < 2; ++a) {
            c.F[2 * p + a] = a == 0 ? u.x : u.y;
            c.dF[2 * p + a] = T[a];
            c.d2F[2 * p + a] = u.k * Nv[a];
            c.d3F[2 * p + a] = kp * Nv[a] - u.k * u.k * T[a];
        }
    }
    return c;
}

}  // namespace

SampledChart al_arc_chart(double k0, double lo, double hi, int interior_count, double rel_tol) {
    const ParameterGrid grid({Axis::truncated(lo, hi, interior_count)});
    std::vector<double> s(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) s[p] = grid.axis(0).coordinate(static_cast<int>(p));
    return chart_from_states(grid, sample_states(k0, s, rel_tol));
}

SampledChart al_closed_chart(double k0, double length, int count, double rel_tol) {
    const ParameterGrid grid({Axis::periodic(count, length)});
    std::vector<double> s(count);
    for (int i = 0; i < count; ++i) s[i] = grid.axis(0).coordinate(i);
    return chart_from_states(grid, sample_states(k0, s, rel_tol));
}

EmbedResult embed(const SampledChart& curve, int n, const std::vector<double>& R, const std::vector<double>& t) {
    if (curve.n != 2) throw ConfigError("embed expects a plane curve chart");
    if (n < 2 || R.size() != static_cast<std::size_t>(n * n) || t.size() != static_cast<std::size_t>(n))
        throw ConfigError("embed: rotation must be n x n and translation length n");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += R[k * n + i] * R[k * n + j];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12) throw ConfigError("embed: rotation is not orthogonal");
        }
    EmbedResult out;
    SampledChart& c = out.chart;
    c.grid = curve.grid;
    c.m = curve.m;
    c.n = n;
    c.source = curve.source;
    c.has_third = curve.has_third;
    auto map = [&](const std::vector<double>& src, bool affine) {
        std::vector<double> dst(src.size() / 2 * n, 0.0);
        for (std::size_t b = 0; b < src.size() / 2; ++b)
            for (int i = 0; i < n; ++i)
                dst[b * n + i] = R[i * n] * src[2 * b] + R[i * n + 1] * src[2 * b + 1] + (affine ? t[i] : 0.0);
        return dst;
    };
    c.F = map(curve.F, true);
    c.dF = map(curve.dF, false);
    c.d2F = map(curve.d2F, false);
    c.d3F = map(curve.d3F, false);
    double tn = 0.0;
    for (double v : t) tn += v * v;
    if (tn > 0.0)
        out.warning = "translation moves the origin; the shrinker equation H = -F^perp is not translation invariant";
    return out;
}

}  // namespace shrinker
