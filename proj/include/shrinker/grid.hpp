#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shrinker {

enum class Topology { periodic, truncated };

/// One uniform parameter axis.
///
/// Truncated axes carry `margin` points at each end that are sampled (so
/// every stencil stays central further in) but excluded from statistics.
struct Axis {
    int count = 0;
    double spacing = 0.0;
    double origin = 0.0;
    Topology topology = Topology::periodic;
    int margin = 0;

    /// `count` points covering [origin, origin + period).
    static Axis periodic(int count, double period, double origin = 0.0);
    /// `interior_count` points spanning [lo, hi] plus `margin` extra points
    /// outside each end.
    static Axis truncated(double lo, double hi, int interior_count, int margin = 3);

    double coordinate(int i) const { return origin + i * spacing; }
    bool is_periodic() const { return topology == Topology::periodic; }
    int first_interior() const { return is_periodic() ? 0 : margin; }
    int last_interior() const { return is_periodic() ? count - 1 : count - 1 - margin; }
};

/// Tensor-product grid over an m-dimensional parameter domain. Points are
/// stored row-major: the last axis varies fastest.
class ParameterGrid {
public:
    ParameterGrid() = default;
    explicit ParameterGrid(std::vector<Axis> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    const Axis& axis(int a) const { return axes_[a]; }
    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t size() const { return size_; }

    std::size_t stride(int a) const { return strides_[a]; }
    int index_along(std::size_t flat, int a) const {
        return static_cast<int>((flat / strides_[a]) % axes_[a].count);
    }
    std::vector<int> multi_index(std::size_t flat) const;
    std::size_t flat_index(std::span<const int> idx) const;
    void coordinates(std::size_t flat, std::span<double> x) const;

    /// Flat index of the point displaced by `offset` along axis `a`.
    /// Periodic axes wrap; truncated axes must stay in range.
    std::size_t shifted(std::size_t flat, int a, int offset) const;

    /// Point inside every truncated margin.
    bool is_interior(std::size_t flat) const;
    std::size_t interior_count() const;
    bool all_periodic() const;
    double max_spacing() const;
    std::vector<double> spacings() const;

    std::string describe() const;

    /// Tensor product: axes of `a` followed by axes of `b`.
    static ParameterGrid product(const ParameterGrid& a, const ParameterGrid& b);

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

/// Second-order central difference operators on grid fields. A field is a
/// flat array with `width` components per point. Near truncated ends the
/// stencil is moved inward, which is only first-order accurate; such points
/// lie in the margin.
namespace fd {

std::vector<double> first(const ParameterGrid& grid, std::span<const double> field,
                          int width, int axis);
std::vector<double> second(const ParameterGrid& grid, std::span<const double> field,
                           int width, int axis);
std::vector<double> third(const ParameterGrid& grid, std::span<const double> field,
                          int width, int axis);

}  // namespace fd

/// Pairwise (cascade) summation; order-independent to ~1e-16 relative.
double pairwise_sum(std::span<const double> values);

}  // namespace shrinker
