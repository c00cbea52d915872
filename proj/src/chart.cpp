#include "shrinker/chart.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "shrinker/errors.hpp"

namespace shrinker {

std::string to_string(DerivativeSource s) {
    return s == DerivativeSource::analytic ? "analytic" : "finite_difference";
}

ImmersionSpec immersion_from_jets(int ambient_dim, JetMap map) {
    ImmersionSpec spec;
    spec.ambient_dim = ambient_dim;
    auto eval = [map, ambient_dim](std::span<const double> x) {
        std::vector<Jet> in;
        for (std::size_t i = 0; i < x.size(); ++i) in.push_back(Jet::variable(static_cast<int>(i), x[i]));
        std::vector<Jet> out(ambient_dim);
        map(in, out);
        return out;
    };
    spec.position = [eval](std::span<const double> x, std::span<double> out) {
        const auto jets = eval(x);
        for (std::size_t a = 0; a < jets.size(); ++a) out[a] = jets[a].value();
    };
    spec.first = [eval](std::span<const double> x, std::span<double> out) {
        const auto jets = eval(x);
        const int m = static_cast<int>(x.size()), n = static_cast<int>(jets.size());
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) out[i * n + a] = jets[a].d(i);
    };
    spec.second = [eval](std::span<const double> x, std::span<double> out) {
        const auto jets = eval(x);
        const int m = static_cast<int>(x.size()), n = static_cast<int>(jets.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int a = 0; a < n; ++a) out[(i * m + j) * n + a] = jets[a].d(i, j);
    };
    spec.third = [eval](std::span<const double> x, std::span<double> out) {
        const auto jets = eval(x);
        const int m = static_cast<int>(x.size()), n = static_cast<int>(jets.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int a = 0; a < n; ++a) out[((i * m + j) * m + k) * n + a] = jets[a].d(i, j, k);
    };
    return spec;
}

namespace {

void fill_finite_differences(SampledChart& c, bool with_third) {
    const int m = c.m, n = c.n;
    const std::size_t N = c.points();
    c.source = DerivativeSource::finite_difference;
    c.dF.assign(N * m * n, 0.0);
    c.d2F.assign(N * m * m * n, 0.0);
    std::vector<std::vector<double>> d1(m);
    for (int i = 0; i < m; ++i) d1[i] = fd::first(c.grid, c.F, n, i);
    for (std::size_t p = 0; p < N; ++p)
        for (int i = 0; i < m; ++i)
            std::copy_n(d1[i].data() + p * n, n, c.dF.data() + (p * m + i) * n);

    // dd[i][j] holds the i-j second partial for i <= j.
    std::vector<std::vector<std::vector<double>>> dd(m, std::vector<std::vector<double>>(m));
    for (int i = 0; i < m; ++i) {
        dd[i][i] = fd::second(c.grid, c.F, n, i);
        for (int j = i + 1; j < m; ++j) dd[i][j] = fd::first(c.grid, d1[i], n, j);
    }
    for (std::size_t p = 0; p < N; ++p)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const auto& src = dd[std::min(i, j)][std::max(i, j)];
                std::copy_n(src.data() + p * n, n, c.d2F.data() + ((p * m + i) * m + j) * n);
            }

    c.has_third = with_third;
    c.d3F.clear();
    if (!with_third) return;
    c.d3F.assign(N * m * m * m * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            for (int k = j; k < m; ++k) {
                std::vector<double> v;
                if (i == j && j == k) v = fd::third(c.grid, c.F, n, i);
                else if (i == j) v = fd::first(c.grid, dd[i][i], n, k);
                else if (j == k) v = fd::first(c.grid, dd[j][j], n, i);
                else v = fd::first(c.grid, dd[i][j], n, k);
                int perm[3] = {i, j, k};
                std::sort(perm, perm + 3);
                do {
                    for (std::size_t p = 0; p < N; ++p)
                        std::copy_n(v.data() + p * n, n,
                                    c.d3F.data() + (((p * m + perm[0]) * m + perm[1]) * m + perm[2]) * n);
                } while (std::next_permutation(perm, perm + 3));
            }
}

}  // namespace

void check_immersion(const SampledChart& chart, double threshold) {
    const int m = chart.m, n = chart.n;
    Eigen::MatrixXd J(n, m);
    for (std::size_t p = 0; p < chart.points(); ++p) {
        if (!chart.grid.is_interior(p)) continue;
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) J(a, i) = chart.first(p, i)[a];
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const double smin = svd.singularValues()(m - 1);
        if (!(smin > threshold)) {
            std::ostringstream os;
            os << "degenerate immersion at grid point (";
            const auto idx = chart.grid.multi_index(p);
            for (std::size_t a = 0; a < idx.size(); ++a) os << (a ? "," : "") << idx[a];
            os << "), parameters (";
            std::vector<double> x(m);
            chart.grid.coordinates(p, x);
            for (int a = 0; a < m; ++a) os << (a ? "," : "") << x[a];
            os << "): smallest singular value " << smin;
            throw DegenerateImmersionError(os.str());
        }
    }
}

SampledChart evaluate_chart(const ImmersionSpec& spec, const ParameterGrid& grid,
                            const ChartOptions& options) {
    if (spec.ambient_dim < grid.dim() + 1) throw ConfigError("ambient dimension must exceed chart dimension");
    if (!spec.position) throw ConfigError("immersion has no position map");
    SampledChart c;
    c.grid = grid;
    c.m = grid.dim();
    c.n = spec.ambient_dim;
    const int m = c.m, n = c.n;
    const std::size_t N = grid.size();
    c.F.assign(N * n, 0.0);
    std::vector<double> x(m);
    for (std::size_t p = 0; p < N; ++p) {
        grid.coordinates(p, x);
        spec.position(x, std::span<double>(c.F.data() + p * n, n));
    }
    if (spec.has_analytic_derivatives() && !options.force_finite_difference) {
        c.source = DerivativeSource::analytic;
        c.dF.assign(N * m * n, 0.0);
        c.d2F.assign(N * m * m * n, 0.0);
        c.has_third = options.with_third && static_cast<bool>(spec.third);
        if (c.has_third) c.d3F.assign(N * m * m * m * n, 0.0);
        for (std::size_t p = 0; p < N; ++p) {
            grid.coordinates(p, x);
            spec.first(x, std::span<double>(c.dF.data() + p * m * n, m * n));
            spec.second(x, std::span<double>(c.d2F.data() + p * m * m * n, m * m * n));
            if (c.has_third) spec.third(x, std::span<double>(c.d3F.data() + p * m * m * m * n, m * m * m * n));
        }
    } else {
        fill_finite_differences(c, options.with_third);
    }
    check_immersion(c, options.rank_threshold);
    return c;
}

SampledChart refit_finite_difference(const SampledChart& chart, bool with_third) {
    SampledChart c;
    c.grid = chart.grid;
    c.m = chart.m;
    c.n = chart.n;
    c.F = chart.F;
    fill_finite_differences(c, with_third);
    return c;
}

double second_derivative_symmetry_defect(const SampledChart& chart) {
    double worst = 0.0;
    for (std::size_t p = 0; p < chart.points(); ++p)
        for (int i = 0; i < chart.m; ++i)
            for (int j = i + 1; j < chart.m; ++j)
                for (int a = 0; a < chart.n; ++a)
                    worst = std::max(worst, std::abs(chart.second(p, i, j)[a] - chart.second(p, j, i)[a]));
    return worst;
}

SampledChart make_product(const SampledChart& a, const SampledChart& b) {
    SampledChart c;
    c.grid = ParameterGrid::product(a.grid, b.grid);
    c.m = a.m + b.m;
    c.n = a.n + b.n;
    c.source = (a.source == DerivativeSource::analytic && b.source == DerivativeSource::analytic)
                   ? DerivativeSource::analytic
                   : DerivativeSource::finite_difference;
    c.has_third = a.has_third && b.has_third;
    const int m = c.m, n = c.n;
    const std::size_t N = c.points();
    c.F.assign(N * n, 0.0);
    c.dF.assign(N * m * n, 0.0);
    c.d2F.assign(N * m * m * n, 0.0);
    if (c.has_third) c.d3F.assign(N * m * m * m * n, 0.0);
    for (std::size_t pa = 0; pa < a.points(); ++pa)
        for (std::size_t pb = 0; pb < b.points(); ++pb) {
            const std::size_t p = pa * b.points() + pb;
            std::copy_n(a.position(pa), a.n, c.F.data() + p * n);
            std::copy_n(b.position(pb), b.n, c.F.data() + p * n + a.n);
            // Derivatives are block diagonal: a-axes only move the first a.n
            // coordinates, b-axes the last b.n.
            for (int i = 0; i < a.m; ++i) {
                std::copy_n(a.first(pa, i), a.n, c.dF.data() + (p * m + i) * n);
                for (int j = 0; j < a.m; ++j) {
                    std::copy_n(a.second(pa, i, j), a.n, c.d2F.data() + ((p * m + i) * m + j) * n);
                    if (c.has_third)
                        for (int k = 0; k < a.m; ++k)
                            std::copy_n(a.third(pa, i, j, k), a.n,
                                        c.d3F.data() + (((p * m + i) * m + j) * m + k) * n);
                }
            }
            for (int i = 0; i < b.m; ++i) {
                const int I = a.m + i;
                std::copy_n(b.first(pb, i), b.n, c.dF.data() + (p * m + I) * n + a.n);
                for (int j = 0; j < b.m; ++j) {
                    const int J = a.m + j;
                    std::copy_n(b.second(pb, i, j), b.n, c.d2F.data() + ((p * m + I) * m + J) * n + a.n);
                    if (c.has_third)
                        for (int k = 0; k < b.m; ++k)
                            std::copy_n(b.third(pb, i, j, k), b.n,
                                        c.d3F.data() + (((p * m + I) * m + J) * m + a.m + k) * n + a.n);
                }
            }
        }
    return c;
}

SampledChart flat_chart(int k, double half_length, int interior_count, DerivativeSource source,
                        bool with_third) {
    if (k < 1 || !(half_length > 0.0)) throw ConfigError("flat factor needs k >= 1 and L > 0");
    std::vector<Axis> axes(k, Axis::truncated(-half_length, half_length, interior_count));
    ImmersionSpec spec = immersion_from_jets(k + 1, [k](std::span<const Jet> x, std::span<Jet> out) {
        for (int i = 0; i < k; ++i) out[i] = x[i];
    });
    // Evaluate in R^{k+1} (the chart API wants codimension >= 1), then drop
    // the dummy coordinate.
    ChartOptions opts;
    opts.with_third = with_third;
    opts.force_finite_difference = source == DerivativeSource::finite_difference;
    SampledChart wide = evaluate_chart(spec, ParameterGrid(axes), opts);
    SampledChart c;
    c.grid = wide.grid;
    c.m = k;
    c.n = k;
    c.source = wide.source;
    c.has_third = wide.has_third;
    auto strip = [&](const std::vector<double>& v) {
        std::vector<double> out;
        out.reserve(v.size() / (k + 1) * k);
        for (std::size_t b = 0; b < v.size(); b += k + 1) out.insert(out.end(), v.begin() + b, v.begin() + b + k);
        return out;
    };
    c.F = strip(wide.F);
    c.dF = strip(wide.dF);
    c.d2F = strip(wide.d2F);
    c.d3F = strip(wide.d3F);
    return c;
}

SampledChart make_cylinder(const SampledChart& curve, int flat_factors, double half_length,
                           int flat_interior_count) {
    if (curve.m != 1) throw ConfigError("make_cylinder needs a one-dimensional curve chart");
    return make_product(curve, flat_chart(flat_factors, half_length, flat_interior_count, curve.source,
                                          curve.has_third));
}

void write_chart_columns(const SampledChart& chart, std::ostream& os) {
    os << "#";
    for (int a = 0; a < chart.m; ++a) os << " i" << a;
    for (int a = 0; a < chart.n; ++a) os << " F" << a;
    os << '\n';
    char buf[32];
    for (std::size_t p = 0; p < chart.points(); ++p) {
        const auto idx = chart.grid.multi_index(p);
        for (int a = 0; a < chart.m; ++a) os << (a ? " " : "") << idx[a];
        for (int a = 0; a < chart.n; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", chart.position(p)[a]);
            os << ' ' << buf;
        }
        os << '\n';
    }
}

std::string chart_metadata_json(const SampledChart& chart) {
    nlohmann::ordered_json j;
    j["ambient_dim"] = chart.n;
    j["derivative_source"] = to_string(chart.source);
    j["axes"] = nlohmann::ordered_json::array();
    for (const auto& ax : chart.grid.axes()) {
        j["axes"].push_back({{"count", ax.count},
                             {"spacing", ax.spacing},
                             {"origin", ax.origin},
                             {"topology", ax.is_periodic() ? "periodic" : "truncated"},
                             {"margin", ax.margin}});
    }
    return j.dump(2);
}

SampledChart read_chart(std::istream& columns, const std::string& metadata_json) {
    const auto j = nlohmann::json::parse(metadata_json);
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes")) {
        Axis ax;
        ax.count = a.at("count").get<int>();
        ax.spacing = a.at("spacing").get<double>();
        ax.origin = a.at("origin").get<double>();
        ax.topology = a.at("topology").get<std::string>() == "periodic" ? Topology::periodic : Topology::truncated;
        ax.margin = a.at("margin").get<int>();
        axes.push_back(ax);
    }
    SampledChart c;
    c.grid = ParameterGrid(axes);
    c.m = c.grid.dim();
    c.n = j.at("ambient_dim").get<int>();
    c.F.assign(c.points() * c.n, 0.0);
    std::string line;
    std::vector<int> idx(c.m);
    std::size_t rows = 0;
    while (std::getline(columns, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        for (int a = 0; a < c.m; ++a) ls >> idx[a];
        const std::size_t p = c.grid.flat_index(idx);
        for (int a = 0; a < c.n; ++a) ls >> c.F[p * c.n + a];
        if (!ls) throw ConfigError("malformed chart row: " + line);
        ++rows;
    }
    if (rows != c.points()) throw ConfigError("chart file row count does not match its metadata");
    fill_finite_differences(c, true);
    return c;
}

}  // namespace shrinker
