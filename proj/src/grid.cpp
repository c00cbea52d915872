#include "shrinker/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shrinker/errors.hpp"

namespace shrinker {

Axis Axis::periodic(int count, double period, double origin) {
    if (count < 8) throw ConfigError("periodic axis needs at least 8 points");
    if (!(period > 0.0)) throw ConfigError("periodic axis needs a positive period");
    return Axis{count, period / count, origin, Topology::periodic, 0};
}

Axis Axis::truncated(double lo, double hi, int interior_count, int margin) {
    if (margin < 3) throw ConfigError("truncated axis margin must be at least 3");
    if (interior_count < 2 || !(hi > lo)) throw ConfigError("truncated axis needs hi > lo and 2+ interior points");
    const int count = interior_count + 2 * margin;
    if (count < 8) throw ConfigError("truncated axis needs at least 8 points");
    const double h = (hi - lo) / (interior_count - 1);
    return Axis{count, h, lo - margin * h, Topology::truncated, margin};
}

ParameterGrid::ParameterGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ConfigError("grid needs at least one axis");
    for (const auto& ax : axes_) {
        if (ax.count < 8) throw ConfigError("every axis needs at least 8 points");
        if (!(ax.spacing > 0.0)) throw ConfigError("axis spacing must be positive");
        if (ax.topology == Topology::truncated && ax.margin < 3)
            throw ConfigError("truncated axis margin must be at least 3");
    }
    strides_.assign(axes_.size(), 1);
    for (int a = dim() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * axes_[a + 1].count;
    size_ = strides_[0] * axes_[0].count;
}

std::vector<int> ParameterGrid::multi_index(std::size_t flat) const {
    std::vector<int> idx(axes_.size());
    for (int a = 0; a < dim(); ++a) idx[a] = index_along(flat, a);
    return idx;
}

std::size_t ParameterGrid::flat_index(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat += strides_[a] * static_cast<std::size_t>(idx[a]);
    return flat;
}

void ParameterGrid::coordinates(std::size_t flat, std::span<double> x) const {
    for (int a = 0; a < dim(); ++a) x[a] = axes_[a].coordinate(index_along(flat, a));
}

std::size_t ParameterGrid::shifted(std::size_t flat, int a, int offset) const {
    const int n = axes_[a].count;
    const int i = index_along(flat, a);
    int j = i + offset;
    if (axes_[a].is_periodic()) {
        j %= n;
        if (j < 0) j += n;
    }
    return flat + strides_[a] * static_cast<std::size_t>(j) - strides_[a] * static_cast<std::size_t>(i);
}

bool ParameterGrid::is_interior(std::size_t flat) const {
    for (int a = 0; a < dim(); ++a) {
        const auto& ax = axes_[a];
        if (ax.is_periodic()) continue;
        const int i = index_along(flat, a);
        if (i < ax.margin || i > ax.count - 1 - ax.margin) return false;
    }
    return true;
}

std::size_t ParameterGrid::interior_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes_) n *= static_cast<std::size_t>(ax.last_interior() - ax.first_interior() + 1);
    return n;
}

bool ParameterGrid::all_periodic() const {
    return std::all_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.is_periodic(); });
}

double ParameterGrid::max_spacing() const {
    double h = 0.0;
    for (const auto& ax : axes_) h = std::max(h, ax.spacing);
    return h;
}

std::vector<double> ParameterGrid::spacings() const {
    std::vector<double> h;
    for (const auto& ax : axes_) h.push_back(ax.spacing);
    return h;
}

std::string ParameterGrid::describe() const {
    std::ostringstream os;
    for (int a = 0; a < dim(); ++a) {
        if (a) os << 'x';
        os << axes_[a].count << (axes_[a].is_periodic() ? "p" : "t");
    }
    return os.str();
}

ParameterGrid ParameterGrid::product(const ParameterGrid& a, const ParameterGrid& b) {
    std::vector<Axis> axes = a.axes_;
    axes.insert(axes.end(), b.axes_.begin(), b.axes_.end());
    return ParameterGrid(std::move(axes));
}

namespace fd {
namespace {

// Index of the stencil centre actually used at position i.
int stencil_centre(const Axis& ax, int i, int radius) {
    if (ax.is_periodic()) return i;
    return std::clamp(i, radius, ax.count - 1 - radius);
}

template <int Radius, typename Weights>
std::vector<double> apply(const ParameterGrid& grid, std::span<const double> field, int width,
                          int axis, const Weights& weights, double scale) {
    std::vector<double> out(field.size(), 0.0);
    const auto& ax = grid.axis(axis);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const int i = grid.index_along(p, axis);
        const int c = stencil_centre(ax, i, Radius);
        const std::size_t centre = grid.shifted(p, axis, c - i);
        double* dst = out.data() + p * width;
        for (int o = -Radius; o <= Radius; ++o) {
            const double w = weights[o + Radius];
            if (w == 0.0) continue;
            const double* src = field.data() + grid.shifted(centre, axis, o) * width;
            for (int k = 0; k < width; ++k) dst[k] += w * src[k];
        }
        for (int k = 0; k < width; ++k) dst[k] *= scale;
    }
    return out;
}

}  // namespace

std::vector<double> first(const ParameterGrid& grid, std::span<const double> field, int width,
                          int axis) {
    constexpr double w[3] = {-1.0, 0.0, 1.0};
    return apply<1>(grid, field, width, axis, w, 0.5 / grid.axis(axis).spacing);
}

std::vector<double> second(const ParameterGrid& grid, std::span<const double> field, int width,
                           int axis) {
    constexpr double w[3] = {1.0, -2.0, 1.0};
    const double h = grid.axis(axis).spacing;
    return apply<1>(grid, field, width, axis, w, 1.0 / (h * h));
}

std::vector<double> third(const ParameterGrid& grid, std::span<const double> field, int width,
                          int axis) {
    constexpr double w[5] = {-1.0, 2.0, 0.0, -2.0, 1.0};
    const double h = grid.axis(axis).spacing;
    return apply<2>(grid, field, width, axis, w, 0.5 / (h * h * h));
}

}  // namespace fd

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace shrinker
