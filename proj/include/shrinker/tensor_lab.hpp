#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shrinker/chart.hpp"

namespace shrinker {

/// Induced metric data per grid point. Index layouts: g, ginv [p][i][j];
/// christoffel [p][k][i][j] = Gamma^k_ij; dchristoffel [p][l][k][i][j] =
/// d_l Gamma^k_ij (analytic charts with third derivatives only).
struct MetricField {
    int m = 0;
    std::vector<double> g;
    std::vector<double> ginv;
    std::vector<double> christoffel;
    std::vector<double> sqrt_det;
    std::vector<double> dchristoffel;

    const double* g_at(std::size_t p) const { return g.data() + p * m * m; }
    const double* ginv_at(std::size_t p) const { return ginv.data() + p * m * m; }
    double gamma(std::size_t p, int k, int i, int j) const {
        return christoffel[((p * m + k) * m + i) * m + j];
    }
};

/// Second fundamental form and the position decomposition. A is [p][i][j][alpha].
struct SFFField {
    int m = 0;
    int n = 0;
    std::vector<double> A;
    std::vector<double> H;       // [p][alpha]
    std::vector<double> H_norm;  // [p]
    std::vector<double> nu;      // [p][alpha], zero where masked
    std::vector<std::uint8_t> nu_defined;
    std::vector<double> theta;   // [p][i] = <F, F_i>
    std::vector<double> F_tan;   // [p][alpha]
    std::vector<double> F_perp;  // [p][alpha]
    double h_threshold = 0.0;

    const double* a(std::size_t p, int i, int j) const { return A.data() + ((p * m + i) * m + j) * n; }
};

/// Algebraic tensors built from A. S and R are [p][i][j][k][l];
/// rperp holds the 2-form M^{ab}_ij as [p][a][b][i][j].
struct DerivedField {
    int m = 0;
    int n = 0;
    std::vector<double> P, Q, ricci;  // [p][i][j]
    std::vector<double> S, riemann;
    std::vector<double> rperp;
    std::vector<double> A2, H2, P2, Q2, S2, PQ, rperp2;  // [p]
    std::vector<double> rperp2_direct;                    // full contraction of rperp
    std::vector<double> binormal;                         // [p][alpha], codimension 2 only
    bool has_binormal = false;
};

/// First and second normal derivatives. nabla_A is [p][k][i][j][alpha]
/// (derivative index first), hess_H [p][i][j][alpha] = nabla_i nabla_j H,
/// lap_A [p][i][j][alpha] = normal Laplacian of A.
struct NormalDerivativeField {
    int m = 0;
    int n = 0;
    std::vector<double> nabla_A;
    std::vector<double> nabla_H;     // [p][k][alpha]
    std::vector<double> nabla_nu;    // [p][k][alpha], zero where nu masked
    std::vector<double> grad_H_norm; // [p][k]
    std::vector<double> nabla_theta; // [p][i][j]
    std::vector<double> hess_H;
    std::vector<double> lap_A;
    std::vector<double> lap_H_perp;  // [p][alpha]
    std::vector<double> lap_A2, lap_H2, lap_H_norm, lap_F2;  // scalar Laplacians
    std::vector<double> nablaA2, nablaH2;                    // |nabla A|^2, |nabla H|^2
    std::vector<double> tau, dtau;   // [p][i], [p][i][j]; codimension 2 only
    bool has_torsion = false;
};

struct FieldOptions {
    /// |H| above h_rel * max|H| counts as nonzero.
    double h_rel = 1e-8;
    bool normal_derivatives = true;
};

/// Everything computed from one chart. Holds a non-owning pointer to the
/// chart, which must outlive it.
struct GeometryFields {
    const SampledChart* chart = nullptr;
    MetricField metric;
    SFFField sff;
    DerivedField derived;
    std::optional<NormalDerivativeField> nd;

    int m() const { return chart->m; }
    int n() const { return chart->n; }
    std::size_t points() const { return chart->points(); }
    const NormalDerivativeField& normal(const std::string& requester) const;
};

MetricField first_fundamental(const SampledChart& chart);
SFFField second_fundamental(const SampledChart& chart, const MetricField& metric, double h_rel = 1e-8);
DerivedField derived_tensors(const SFFField& sff, const MetricField& metric);
NormalDerivativeField normal_derivatives(const SampledChart& chart, const MetricField& metric,
                                         const SFFField& sff, const DerivedField& derived);
GeometryFields compute_fields(const SampledChart& chart, const FieldOptions& options = {});

/// Divergence-form Laplace-Beltrami operator of a scalar field.
std::vector<double> scalar_laplacian(const ParameterGrid& grid, const MetricField& metric,
                                     const std::vector<double>& f);

/// Intrinsic Riemann tensor R_ijkl from Christoffel symbols, [p][i][j][k][l].
std::vector<double> intrinsic_riemann(const SampledChart& chart, const MetricField& metric);

/// A pointwise residual with a validity mask (1 = hypothesis holds there).
struct ResidualField {
    std::string identity;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
};

struct ResidualReport {
    std::string identity;
    double h = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::optional<double> order;
    bool pass = false;
    // Bookkeeping kept out of the fixed-key JSON object.
    double tolerance = 0.0;
    double mask_fraction = 0.0;
    bool mask_warning = false;
    std::string note;
};

/// Interior, unmasked statistics of a residual field.
ResidualReport summarize(const ResidualField& field, const ParameterGrid& grid, double tolerance);

enum class StructureKind { gauss, codazzi, ricci, ricci_trace, simons_scalar, normality, rperp_norm, torsion };

StructureKind parse_structure_kind(const std::string& name);
std::string to_string(StructureKind k);
/// True when the identity only involves the chart's own derivatives.
bool is_algebraic(StructureKind k, const SampledChart& chart);

ResidualField structure_field(StructureKind kind, const GeometryFields& fields);
ResidualReport structure_residual(StructureKind kind, const GeometryFields& fields, double tolerance);

/// Least-squares slope of log(max) against log(h) over a refinement sequence,
/// or nullopt with fewer than two reports or a vanishing residual.
std::optional<double> convergence_order(const std::vector<ResidualReport>& reports);

/// {identity, h, max, mean, order, pass} with 17 significant digits.
std::string residual_report_json(const ResidualReport& r);
nlohmann::ordered_json residual_report_object(const ResidualReport& r);
/// One row per grid point: multi-index, valid flag, residual.
void write_residual_columns(const ResidualField& field, const ParameterGrid& grid, std::ostream& os);

/// g-norm squared of a normal-valued 2-tensor T [i][j][alpha] at one point.
double tensor2_norm2(const double* T, const double* ginv, int m, int n);

}  // namespace shrinker
