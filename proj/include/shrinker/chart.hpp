#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shrinker/grid.hpp"
#include "shrinker/jet.hpp"

namespace shrinker {

enum class DerivativeSource { analytic, finite_difference };

std::string to_string(DerivativeSource s);

/// Map from parameters x (size m) to a point of R^n, with optional closed-form
/// partial derivatives. Derivative callbacks fill row-major [i][alpha],
/// [i][j][alpha] and [i][j][k][alpha] blocks.
struct ImmersionSpec {
    int ambient_dim = 0;
    using Callback = std::function<void(std::span<const double> x, std::span<double> out)>;
    Callback position;
    Callback first;
    Callback second;
    Callback third;

    bool has_analytic_derivatives() const { return first && second; }
};

/// Builds all four callbacks of an m <= 3 parameter map from one function
/// evaluated on jets.
using JetMap = std::function<void(std::span<const Jet> x, std::span<Jet> out)>;
ImmersionSpec immersion_from_jets(int ambient_dim, JetMap map);

struct ChartOptions {
    bool with_third = true;
    /// Smallest singular value of dF below this at an interior point is a
    /// degenerate immersion.
    double rank_threshold = 1e-8;
    /// Ignore callbacks and difference the sampled positions instead.
    bool force_finite_difference = false;
};

/// Positions and parameter derivatives of an immersion sampled on a grid.
struct SampledChart {
    ParameterGrid grid;
    int m = 0;
    int n = 0;
    DerivativeSource source = DerivativeSource::analytic;
    bool has_third = false;
    std::vector<double> F;    // [p][alpha]
    std::vector<double> dF;   // [p][i][alpha]
    std::vector<double> d2F;  // [p][i][j][alpha]
    std::vector<double> d3F;  // [p][i][j][k][alpha], empty unless has_third

    std::size_t points() const { return grid.size(); }
    const double* position(std::size_t p) const { return F.data() + p * n; }
    const double* first(std::size_t p, int i) const { return dF.data() + (p * m + i) * n; }
    const double* second(std::size_t p, int i, int j) const {
        return d2F.data() + ((p * m + i) * m + j) * n;
    }
    const double* third(std::size_t p, int i, int j, int k) const {
        return d3F.data() + (((p * m + i) * m + j) * m + k) * n;
    }
};

SampledChart evaluate_chart(const ImmersionSpec& spec, const ParameterGrid& grid,
                            const ChartOptions& options = {});

/// Re-derive every derivative of `chart` from its positions alone.
SampledChart refit_finite_difference(const SampledChart& chart, bool with_third = true);

/// Throws DegenerateImmersionError naming the first interior point where dF
/// has smallest singular value <= threshold.
void check_immersion(const SampledChart& chart, double threshold);

/// Largest |d2F_ij - d2F_ji| over the grid.
double second_derivative_symmetry_defect(const SampledChart& chart);

/// Product immersion into R^{n_a + n_b} on the tensor-product grid.
SampledChart make_product(const SampledChart& a, const SampledChart& b);

/// Identity map of [-half_length, half_length]^k into R^k on truncated axes.
SampledChart flat_chart(int k, double half_length, int interior_count,
                        DerivativeSource source = DerivativeSource::analytic, bool with_third = true);

/// curve x [-L, L]^k, the flat directions appended as new ambient coordinates.
SampledChart make_cylinder(const SampledChart& curve, int flat_factors, double half_length,
                           int flat_interior_count = 9);

/// Columnar text dump: one row per grid point with the multi-index followed
/// by the components of F.
void write_chart_columns(const SampledChart& chart, std::ostream& os);
/// JSON sidecar describing the grid and ambient dimension.
std::string chart_metadata_json(const SampledChart& chart);
/// Reads back the grid and positions written by the two functions above.
/// Derivatives are re-derived by finite differences.
SampledChart read_chart(std::istream& columns, const std::string& metadata_json);

}  // namespace shrinker
