#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shrinker/tensor_lab.hpp"

namespace shrinker {

enum class IdentityKind {
    ss2, mean, ss4, ss6, ss7, ss9, ss13, ss24, ss25,
    lemma1_eigen, lemma1_sym, lemma2, lemma3,
    extra0, extra9, vanish,
};

IdentityKind parse_identity_kind(const std::string& name);
std::string to_string(IdentityKind k);
const std::vector<IdentityKind>& all_identity_kinds();
/// True when the residual uses no differencing beyond the chart's own derivatives.
bool is_algebraic(IdentityKind k, const SampledChart& chart);

/// Thresholds defining where an identity's hypotheses hold.
struct HypothesisOptions {
    double parallel_tol = 1e-6;  // |nabla^perp nu| for "parallel principal normal"
    double gradient_tol = 1e-6;  // |nabla^perp H| for "H parallel"
    double pinch_rel_tol = 1e-6; // ||P|^2 - |H|^4| relative to |H|^4
    double cluster_tol = 1e-4;   // relative eigenvalue cutoff for the kernel of P
};

/// Default thresholds: fixed for analytic charts, 10 h^2 for differenced ones.
HypothesisOptions default_hypotheses(const SampledChart& chart);

/// Tolerance policy: algebraic identities on analytic charts get `algebraic`,
/// everything else fd_constant * h^2 + algebraic.
struct ToleranceModel {
    double algebraic = 1e-9;
    double fd_constant = 1.0;

    double for_identity(IdentityKind k, const SampledChart& c) const;
    double for_structure(StructureKind k, const SampledChart& c) const;
    double differenced(const SampledChart& c) const;
};

/// |H + F^perp| pointwise.
ResidualField shrinker_field(const GeometryFields& f);
ResidualReport shrinker_residual(const GeometryFields& f, double tolerance);

ResidualField identity_field(IdentityKind kind, const GeometryFields& f, const HypothesisOptions& h);
ResidualReport identity_residual(IdentityKind kind, const GeometryFields& f, double tolerance,
                                 const HypothesisOptions& h);

struct PinchingStats {
    std::vector<double> ratio;  // |P|^2/|H|^4, 0 where nu is masked
    double max = 0.0;
    double min = 0.0;
    double spread = 0.0;
    double mean = 0.0;
};

/// Throws MaskedError when |H| vanishes on the whole interior.
PinchingStats pinching_ratio(const GeometryFields& f);

struct RankInfo {
    std::vector<int> rank;             // -1 where masked
    std::vector<double> eigenvalues;   // [p][m], ascending, of P relative to g
    int mode = -1;
    bool ambiguous = false;
    double min_nonzero = 0.0;          // smallest eigenvalue counted as nonzero, relative
    double max_zero = 0.0;             // largest eigenvalue counted as zero, relative
    std::vector<std::string> warnings;
};

RankInfo principal_rank(const GeometryFields& f, double cluster_tol = 1e-4);

/// |A - (P/|H|) nu|^2 pointwise, 0 where masked.
std::vector<double> reduced_tensor_norm2(const GeometryFields& f);

/// Pointwise |nabla (|P|^2/|H|^4)|^2 |H|^2 and 2 |P|^2/|H|^6 |T|^2.
std::vector<double> lemma4_term1(const GeometryFields& f);
std::vector<double> lemma4_term2(const GeometryFields& f);

struct WeightedIntegral {
    std::string integrand;
    double value = 0.0;
    double h = 0.0;
    std::optional<double> error_estimate;
    double boundary_max = 0.0;
};

/// Quadrature of integrand * exp(-|F|^2/2) * sqrt(det g) over the interior.
/// Trapezoidal weights; truncated axes must see a negligible boundary layer.
WeightedIntegral gaussian_weighted_integral(const GeometryFields& f, const std::vector<double>& integrand,
                                            const std::string& name, double boundary_tol = 1e-12);

enum class Verdict { spherical, class_i_curve_cylinder, class_ii_product, non_shrinker, non_spherical, unknown };
std::string to_string(Verdict v);

struct ClassifyOptions {
    double shrinker_tol = 1e-6;
    double sphere_tol = 1e-6;    // ||F|^2 - m|
    double parallel_tol = 1e-6;  // max |nabla^perp nu|
    double vanish_tol = 1e-6;
    double cluster_tol = 1e-4;
    bool compact = false;
};

struct Classification {
    Verdict verdict = Verdict::unknown;
    int rank = -1;
    std::string note;
    nlohmann::ordered_json evidence;
};

Classification classify(const GeometryFields& f, const ClassifyOptions& options);

/// Largest interior |nabla^perp nu| over unmasked points.
double parallel_nu_defect(const GeometryFields& f);

}  // namespace shrinker
