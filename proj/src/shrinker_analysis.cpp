#include "shrinker/shrinker_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shrinker/errors.hpp"
#include "shrinker/report.hpp"

namespace shrinker {

namespace {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

const std::vector<std::pair<IdentityKind, const char*>>& kind_names() {
    static const std::vector<std::pair<IdentityKind, const char*>> names{
        {IdentityKind::ss2, "ss2"},       {IdentityKind::mean, "mean"},
        {IdentityKind::ss4, "ss4"},       {IdentityKind::ss6, "ss6"},
        {IdentityKind::ss7, "ss7"},       {IdentityKind::ss9, "ss9"},
        {IdentityKind::ss13, "ss13"},     {IdentityKind::ss24, "ss24"},
        {IdentityKind::ss25, "ss25"},     {IdentityKind::lemma1_eigen, "lemma1_eigen"},
        {IdentityKind::lemma1_sym, "lemma1_sym"}, {IdentityKind::lemma2, "lemma2"},
        {IdentityKind::lemma3, "lemma3"}, {IdentityKind::extra0, "extra0"},
        {IdentityKind::extra9, "extra9"}, {IdentityKind::vanish, "vanish"},
    };
    return names;
}

// Per-point quantities shared by several identities.
struct Local {
    int m, n;
    const double* gi;
    std::vector<double> theta_up;  // theta^k
    std::vector<double> P_mixed;   // P_i^k = P_il g^lk, [i][k]
    std::vector<double> P_up;      // P^ij

    Local(const GeometryFields& f, std::size_t p) : m(f.m()), n(f.n()), gi(f.metric.ginv_at(p)) {
        theta_up.assign(m, 0.0);
        P_mixed.assign(m * m, 0.0);
        P_up.assign(m * m, 0.0);
        const double* P = f.derived.P.data() + p * m * m;
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) theta_up[k] += gi[k * m + l] * f.sff.theta[p * m + l];
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) P_mixed[i * m + k] += P[i * m + l] * gi[l * m + k];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int a = 0; a < m; ++a) P_up[i * m + j] += gi[i * m + a] * P_mixed[a * m + j];
    }
};

// nabla_k P_ij = <nabla_k H, A_ij> + <H, nabla_k A_ij>, [k][i][j]
std::vector<double> nabla_P(const GeometryFields& f, std::size_t p) {
    const int m = f.m(), n = f.n();
    const auto& nd = *f.nd;
    std::vector<double> out(m * m * m);
    const double* H = f.sff.H.data() + p * n;
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                out[(k * m + i) * m + j] =
                    dot(nd.nabla_H.data() + (p * m + k) * n, f.sff.a(p, i, j), n) +
                    dot(H, nd.nabla_A.data() + (((p * m + k) * m + i) * m + j) * n, n);
    return out;
}

// d_k (|P|^2/|H|^4), requires |H| > 0.
std::vector<double> grad_ratio(const GeometryFields& f, std::size_t p, const std::vector<double>& dP) {
    const int m = f.m();
    const Local L(f, p);
    const double h = f.sff.H_norm[p];
    const double h4 = h * h * h * h;
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k) {
        double dP2 = 0.0;
        for (int ij = 0; ij < m * m; ++ij) dP2 += 2.0 * L.P_up[ij] * dP[k * m * m + ij];
        out[k] = dP2 / h4 - 4.0 * f.derived.P2[p] * f.nd->grad_H_norm[p * m + k] / (h4 * h);
    }
    return out;
}

// |T|^2 with T_ijk = 2 nabla_i|H| P_jk/|H| - nabla_i P_jk.
double t_norm2(const GeometryFields& f, std::size_t p, const std::vector<double>& dP) {
    const int m = f.m();
    const double* gi = f.metric.ginv_at(p);
    const double* P = f.derived.P.data() + p * m * m;
    const double h = f.sff.H_norm[p];
    std::vector<double> T(m * m * m);
    for (int i = 0; i < m; ++i)
        for (int jk = 0; jk < m * m; ++jk)
            T[i * m * m + jk] = 2.0 * f.nd->grad_H_norm[p * m + i] * P[jk] / h - dP[i * m * m + jk];
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        for (int c = 0; c < m; ++c)
                            s += gi[i * m + a] * gi[j * m + b] * gi[k * m + c] * T[(i * m + j) * m + k] *
                                 T[(a * m + b) * m + c];
    return s;
}

double one_form_norm(const double* X, const double* gi, int m, int n) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += gi[i * m + j] * dot(X + i * n, X + j * n, n);
    return std::sqrt(std::max(0.0, s));
}

double nu_defect_at(const GeometryFields& f, std::size_t p) {
    return one_form_norm(f.nd->nabla_nu.data() + p * f.m() * f.n(), f.metric.ginv_at(p), f.m(), f.n());
}

double grad_h_at(const GeometryFields& f, std::size_t p) {
    return one_form_norm(f.nd->nabla_H.data() + p * f.m() * f.n(), f.metric.ginv_at(p), f.m(), f.n());
}

// Generalized eigenpairs of P v = lambda g v, eigenvectors g-orthonormal.
void eigen_P(const GeometryFields& f, std::size_t p, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const int m = f.m();
    Eigen::MatrixXd P(m, m), G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            P(i, j) = 0.5 * (f.derived.P[(p * m + i) * m + j] + f.derived.P[(p * m + j) * m + i]);
            G(i, j) = f.metric.g[(p * m + i) * m + j];
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(P, G);
    values = es.eigenvalues();
    vectors = es.eigenvectors();
}

}  // namespace

IdentityKind parse_identity_kind(const std::string& name) {
    for (const auto& [k, s] : kind_names())
        if (name == s) return k;
    throw ConfigError("unknown identity: " + name);
}

std::string to_string(IdentityKind k) {
    for (const auto& [kk, s] : kind_names())
        if (kk == k) return s;
    return "?";
}

const std::vector<IdentityKind>& all_identity_kinds() {
    static const std::vector<IdentityKind> all = [] {
        std::vector<IdentityKind> v;
        for (const auto& e : kind_names()) v.push_back(e.first);
        return v;
    }();
    return all;
}

bool is_algebraic(IdentityKind k, const SampledChart& c) {
    if (c.source != DerivativeSource::analytic) return false;
    switch (k) {
        case IdentityKind::ss2:
        case IdentityKind::lemma1_eigen:
        case IdentityKind::lemma1_sym:
        case IdentityKind::extra0:
        case IdentityKind::extra9:
        case IdentityKind::vanish: return true;
        case IdentityKind::mean:
        case IdentityKind::lemma2: return c.has_third;
        default: return false;
    }
}

HypothesisOptions default_hypotheses(const SampledChart& c) {
    HypothesisOptions h;
    if (c.source == DerivativeSource::finite_difference) {
        const double hh = c.grid.max_spacing();
        h.parallel_tol = h.gradient_tol = 10.0 * hh * hh;
        h.pinch_rel_tol = 10.0 * hh * hh;
    }
    return h;
}

double ToleranceModel::differenced(const SampledChart& c) const {
    const double h = c.grid.max_spacing();
    return fd_constant * h * h + algebraic;
}

double ToleranceModel::for_identity(IdentityKind k, const SampledChart& c) const {
    return is_algebraic(k, c) ? algebraic : differenced(c);
}

double ToleranceModel::for_structure(StructureKind k, const SampledChart& c) const {
    return is_algebraic(k, c) ? algebraic : differenced(c);
}

ResidualField shrinker_field(const GeometryFields& f) {
    const int n = f.n();
    ResidualField r;
    r.identity = "shrinker";
    r.values.assign(f.points(), 0.0);
    r.valid.assign(f.points(), 1);
    for (std::size_t p = 0; p < f.points(); ++p) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
            const double v = f.sff.H[p * n + a] + f.sff.F_perp[p * n + a];
            s += v * v;
        }
        r.values[p] = std::sqrt(s);
    }
    return r;
}

ResidualReport shrinker_residual(const GeometryFields& f, double tolerance) {
    return summarize(shrinker_field(f), f.chart->grid, tolerance);
}

double parallel_nu_defect(const GeometryFields& f) {
    const auto& nd = f.normal("parallel_nu");
    (void)nd;
    double worst = 0.0;
    for (std::size_t p = 0; p < f.points(); ++p)
        if (f.chart->grid.is_interior(p) && f.sff.nu_defined[p]) worst = std::max(worst, nu_defect_at(f, p));
    return worst;
}

ResidualField identity_field(IdentityKind kind, const GeometryFields& f, const HypothesisOptions& hyp) {
    const int m = f.m(), n = f.n(), m2 = m * m;
    const std::size_t N = f.points();
    const auto& s = f.sff;
    const auto& d = f.derived;
    ResidualField r;
    r.identity = to_string(kind);
    r.values.assign(N, 0.0);
    r.valid.assign(N, 1);
    const auto& nd = f.normal(r.identity);

    auto nablaA = [&](std::size_t p, int k, int i, int j) {
        return nd.nabla_A.data() + (((p * m + k) * m + i) * m + j) * n;
    };
    auto needs_parallel_nu = [&](std::size_t p) {
        return s.nu_defined[p] && nu_defect_at(f, p) <= hyp.parallel_tol;
    };
    std::vector<double> X(m2 * n), v(n);

    // The lemma3 residual needs the Laplacian of the pinching ratio as a field.
    std::vector<double> lap_ratio;
    if (kind == IdentityKind::lemma3) {
        std::vector<double> ratio(N, 0.0);
        for (std::size_t p = 0; p < N; ++p)
            if (s.nu_defined[p]) ratio[p] = d.P2[p] / (d.H2[p] * d.H2[p]);
        lap_ratio = scalar_laplacian(f.chart->grid, f.metric, ratio);
    }

    for (std::size_t p = 0; p < N; ++p) {
        const Local L(f, p);
        const double* gi = L.gi;
        const double* P = d.P.data() + p * m2;
        const double* H = s.H.data() + p * n;
        double& out = r.values[p];
        switch (kind) {
            case IdentityKind::ss2:
                for (int ij = 0; ij < m2; ++ij)
                    out = std::max(out, std::abs(nd.nabla_theta[p * m2 + ij] - f.metric.g[p * m2 + ij] + P[ij]));
                break;
            case IdentityKind::mean: {
                std::fill(X.begin(), X.end(), 0.0);
                for (int i = 0; i < m; ++i)
                    for (int a = 0; a < n; ++a) {
                        double t = nd.nabla_H[(p * m + i) * n + a];
                        for (int k = 0; k < m; ++k) t -= L.theta_up[k] * s.a(p, i, k)[a];
                        X[i * n + a] = t;
                    }
                out = one_form_norm(X.data(), gi, m, n);
                break;
            }
            case IdentityKind::ss4: {
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int a = 0; a < n; ++a) {
                            double t = nd.hess_H[((p * m + i) * m + j) * n + a] - s.a(p, i, j)[a];
                            for (int k = 0; k < m; ++k)
                                t += L.P_mixed[i * m + k] * s.a(p, k, j)[a] - L.theta_up[k] * nablaA(p, k, i, j)[a];
                            X[(i * m + j) * n + a] = t;
                        }
                out = std::sqrt(std::max(0.0, tensor2_norm2(X.data(), gi, m, n)));
                break;
            }
            case IdentityKind::ss6: {
                for (int a = 0; a < n; ++a) {
                    double t = nd.lap_H_perp[p * n + a] - H[a];
                    for (int k = 0; k < m; ++k) t -= L.theta_up[k] * nd.nabla_H[(p * m + k) * n + a];
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) t += L.P_up[i * m + j] * s.a(p, i, j)[a];
                    v[a] = t;
                }
                out = std::sqrt(dot(v.data(), v.data(), n));
                break;
            }
            case IdentityKind::ss7: {
                double adv = 0.0;
                for (int k = 0; k < m; ++k) adv += L.theta_up[k] * 2.0 * dot(H, nd.nabla_H.data() + (p * m + k) * n, n);
                out = std::abs(nd.lap_H2[p] - 2.0 * nd.nablaH2[p] - adv + 2.0 * d.P2[p] - 2.0 * d.H2[p]);
                break;
            }
            case IdentityKind::ss9: {
                const double* S = d.S.data() + p * m2 * m2;
                const double* R = d.riemann.data() + p * m2 * m2;
                const double* Q = d.Q.data() + p * m2;
                std::vector<double> Q_up_mixed(m2, 0.0);  // Q^k_i = g^kl Q_li, [k][i]
                for (int k = 0; k < m; ++k)
                    for (int i = 0; i < m; ++i)
                        for (int l = 0; l < m; ++l) Q_up_mixed[k * m + i] += gi[k * m + l] * Q[l * m + i];
                std::vector<double> A_up(m2 * n, 0.0);  // A^kl
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        for (int a2 = 0; a2 < m; ++a2)
                            for (int b2 = 0; b2 < m; ++b2) {
                                const double w = gi[k * m + a2] * gi[l * m + b2];
                                for (int a = 0; a < n; ++a) A_up[(k * m + l) * n + a] += w * s.a(p, a2, b2)[a];
                            }
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int a = 0; a < n; ++a) {
                            double t = nd.lap_A[((p * m + i) * m + j) * n + a] - s.a(p, i, j)[a];
                            for (int k = 0; k < m; ++k) {
                                t -= L.theta_up[k] * nablaA(p, k, i, j)[a];
                                t += Q_up_mixed[k * m + i] * s.a(p, k, j)[a] + Q_up_mixed[k * m + j] * s.a(p, k, i)[a];
                                for (int l = 0; l < m; ++l) {
                                    const int ikjl = ((i * m + k) * m + j) * m + l;
                                    t += (R[ikjl] - S[ikjl]) * A_up[(k * m + l) * n + a];
                                }
                            }
                            X[(i * m + j) * n + a] = t;
                        }
                out = std::sqrt(std::max(0.0, tensor2_norm2(X.data(), gi, m, n)));
                break;
            }
            case IdentityKind::ss13: {
                double adv = 0.0;
                for (int k = 0; k < m; ++k) {
                    double dA2 = 0.0;
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j)
                            for (int a2 = 0; a2 < m; ++a2)
                                for (int b2 = 0; b2 < m; ++b2)
                                    dA2 += 2.0 * gi[i * m + a2] * gi[j * m + b2] * dot(s.a(p, i, j), nablaA(p, k, a2, b2), n);
                    adv += L.theta_up[k] * dA2;
                }
                out = std::abs(nd.lap_A2[p] - 2.0 * nd.nablaA2[p] - adv + 2.0 * d.S2[p] + 2.0 * d.rperp2[p] -
                               2.0 * d.A2[p]);
                break;
            }
            case IdentityKind::ss24: {
                const double h4 = d.H2[p] * d.H2[p];
                if (!s.nu_defined[p] || std::abs(d.P2[p] - h4) > hyp.pinch_rel_tol * h4) {
                    r.valid[p] = 0;
                    break;
                }
                double adv = 0.0;
                for (int k = 0; k < m; ++k) adv += L.theta_up[k] * nd.grad_H_norm[p * m + k];
                const double h = s.H_norm[p];
                out = std::abs(nd.lap_H_norm[p] - adv + h * h * h - h);
                break;
            }
            case IdentityKind::ss25:
                out = std::abs(nd.lap_F2[p] - 2.0 * (m - d.H2[p]));
                break;
            case IdentityKind::lemma1_eigen: {
                if (!needs_parallel_nu(p)) {
                    r.valid[p] = 0;
                    break;
                }
                const double h = s.H_norm[p];
                const double* nu = s.nu.data() + p * n;
                for (int a = 0; a < n; ++a) {
                    double t = -d.P2[p] / h * nu[a];
                    for (int ij = 0; ij < m2; ++ij) t += L.P_up[ij] * s.a(p, ij / m, ij % m)[a];
                    v[a] = t;
                }
                double spp = 0.0;
                const double* S = d.S.data() + p * m2 * m2;
                for (int ij = 0; ij < m2; ++ij)
                    for (int kl = 0; kl < m2; ++kl) spp += S[ij * m2 + kl] * L.P_up[ij] * L.P_up[kl];
                out = std::max(std::sqrt(dot(v.data(), v.data(), n)), std::abs(spp - d.P2[p] * d.P2[p] / d.H2[p]));
                break;
            }
            case IdentityKind::lemma1_sym: {
                if (!needs_parallel_nu(p)) {
                    r.valid[p] = 0;
                    break;
                }
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        for (int a = 0; a < n; ++a) {
                            double t = 0.0;
                            for (int k = 0; k < m; ++k)
                                t += L.P_mixed[i * m + k] * s.a(p, k, j)[a] - L.P_mixed[j * m + k] * s.a(p, k, i)[a];
                            out = std::max(out, std::abs(t));
                        }
                    }
                const double* S = d.S.data() + p * m2 * m2;
                const double* Q = d.Q.data() + p * m2;
                double lhs = 0.0, rhs = 0.0;
                std::vector<double> Q_up(m2, 0.0);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int a2 = 0; a2 < m; ++a2)
                            for (int b2 = 0; b2 < m; ++b2) Q_up[i * m + j] += gi[i * m + a2] * gi[j * m + b2] * Q[a2 * m + b2];
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < m; ++k)
                        for (int j = 0; j < m; ++j)
                            for (int l = 0; l < m; ++l)
                                lhs += S[((i * m + k) * m + j) * m + l] * L.P_up[i * m + j] * L.P_up[k * m + l];
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int k = 0; k < m; ++k) rhs += L.P_mixed[i * m + k] * P[k * m + j] * Q_up[i * m + j];
                out = std::max(out, std::abs(lhs - rhs));
                break;
            }
            case IdentityKind::lemma2: {
                if (!needs_parallel_nu(p)) {
                    r.valid[p] = 0;
                    break;
                }
                const auto dP = nabla_P(f, p);
                const auto dr = grad_ratio(f, p, dP);
                const double h = s.H_norm[p];
                double lhs = 0.0, cross = 0.0, gh2 = 0.0;
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        const double w = gi[k * m + l];
                        for (int ij = 0; ij < m2; ++ij)
                            lhs += w * L.P_up[ij] * dot(nd.nabla_H.data() + (p * m + k) * n, nablaA(p, l, ij / m, ij % m), n);
                        cross += w * nd.grad_H_norm[p * m + k] * dr[l];
                        gh2 += w * nd.grad_H_norm[p * m + k] * nd.grad_H_norm[p * m + l];
                    }
                const double h4 = d.H2[p] * d.H2[p];
                out = std::abs(4.0 / h4 * lhs - 2.0 / h * cross - 4.0 * d.P2[p] / (h4 * d.H2[p]) * gh2);
                break;
            }
            case IdentityKind::lemma3: {
                if (!needs_parallel_nu(p)) {
                    r.valid[p] = 0;
                    break;
                }
                const auto dP = nabla_P(f, p);
                const auto dr = grad_ratio(f, p, dP);
                const double h = s.H_norm[p];
                double adv = 0.0, cross = 0.0;
                for (int k = 0; k < m; ++k) {
                    adv += L.theta_up[k] * dr[k];
                    for (int l = 0; l < m; ++l) cross += gi[k * m + l] * nd.grad_H_norm[p * m + k] * dr[l];
                }
                const double h4 = d.H2[p] * d.H2[p];
                out = std::abs(lap_ratio[p] - 2.0 / h4 * t_norm2(f, p, dP) - adv + 2.0 / h * cross);
                break;
            }
            case IdentityKind::extra0: {
                if (grad_h_at(f, p) > hyp.gradient_tol) {
                    r.valid[p] = 0;
                    break;
                }
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double sq = 0.0;
                        for (int k = 0; k < m; ++k) sq += L.P_mixed[i * m + k] * L.P_mixed[k * m + j];
                        out = std::max(out, std::abs(L.P_mixed[i * m + j] - sq));
                    }
                break;
            }
            case IdentityKind::extra9: {
                if (grad_h_at(f, p) > hyp.gradient_tol) {
                    r.valid[p] = 0;
                    break;
                }
                std::fill(X.begin(), X.end(), 0.0);
                for (int j = 0; j < m; ++j)
                    for (int i = 0; i < m; ++i)
                        for (int a = 0; a < n; ++a) X[j * n + a] += L.theta_up[i] * s.a(p, i, j)[a];
                out = one_form_norm(X.data(), gi, m, n);
                break;
            }
            case IdentityKind::vanish: {
                if (!s.nu_defined[p]) {
                    r.valid[p] = 0;
                    break;
                }
                Eigen::VectorXd lam;
                Eigen::MatrixXd vec;
                eigen_P(f, p, lam, vec);
                const double top = lam.cwiseAbs().maxCoeff();
                bool any = false;
                for (int e = 0; e < m; ++e) {
                    if (std::abs(lam(e)) > hyp.cluster_tol * top) continue;
                    any = true;
                    std::fill(X.begin(), X.end(), 0.0);
                    for (int j = 0; j < m; ++j)
                        for (int i = 0; i < m; ++i)
                            for (int a = 0; a < n; ++a) X[j * n + a] += vec(i, e) * s.a(p, i, j)[a];
                    out = std::max(out, one_form_norm(X.data(), gi, m, n));
                }
                if (!any) r.valid[p] = 0;
                break;
            }
        }
    }
    return r;
}

ResidualReport identity_residual(IdentityKind kind, const GeometryFields& f, double tolerance,
                                 const HypothesisOptions& h) {
    return summarize(identity_field(kind, f, h), f.chart->grid, tolerance);
}

PinchingStats pinching_ratio(const GeometryFields& f) {
    const std::size_t N = f.points();
    PinchingStats st;
    st.ratio.assign(N, 0.0);
    std::vector<double> vals;
    for (std::size_t p = 0; p < N; ++p) {
        if (!f.sff.nu_defined[p]) continue;
        st.ratio[p] = f.derived.P2[p] / (f.derived.H2[p] * f.derived.H2[p]);
        if (f.chart->grid.is_interior(p)) vals.push_back(st.ratio[p]);
    }
    if (vals.empty()) throw MaskedError("pinching ratio undefined: |H| vanishes on the whole interior");
    st.max = *std::max_element(vals.begin(), vals.end());
    st.min = *std::min_element(vals.begin(), vals.end());
    st.spread = st.max - st.min;
    st.mean = pairwise_sum(vals) / static_cast<double>(vals.size());
    return st;
}

RankInfo principal_rank(const GeometryFields& f, double cluster_tol) {
    const int m = f.m();
    const std::size_t N = f.points();
    RankInfo info;
    info.rank.assign(N, -1);
    info.eigenvalues.assign(N * m, 0.0);
    info.min_nonzero = std::numeric_limits<double>::infinity();
    std::map<int, std::size_t> votes;
    for (std::size_t p = 0; p < N; ++p) {
        if (!f.sff.nu_defined[p]) continue;
        Eigen::VectorXd lam;
        Eigen::MatrixXd vec;
        eigen_P(f, p, lam, vec);
        const double top = lam.cwiseAbs().maxCoeff();
        int r = 0;
        for (int e = 0; e < m; ++e) {
            info.eigenvalues[p * m + e] = lam(e);
            const double rel = top > 0.0 ? std::abs(lam(e)) / top : 0.0;
            if (rel > cluster_tol) {
                ++r;
                if (f.chart->grid.is_interior(p)) info.min_nonzero = std::min(info.min_nonzero, rel);
            } else if (f.chart->grid.is_interior(p)) {
                info.max_zero = std::max(info.max_zero, rel);
            }
        }
        info.rank[p] = r;
        if (f.chart->grid.is_interior(p)) ++votes[r];
    }
    if (votes.empty()) {
        info.warnings.push_back("rank undefined: |H| vanishes on the whole interior");
        return info;
    }
    info.mode = std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
    if (votes.size() > 1) info.warnings.push_back("rank varies across the grid");
    if (info.min_nonzero < 10.0 * cluster_tol || (info.max_zero > 0.1 * cluster_tol)) {
        info.ambiguous = true;
        info.warnings.push_back("an eigenvalue of P lies within a factor 10 of the cluster threshold");
    }
    if (!std::isfinite(info.min_nonzero)) info.min_nonzero = 0.0;
    return info;
}

std::vector<double> reduced_tensor_norm2(const GeometryFields& f) {
    const int m = f.m(), n = f.n();
    std::vector<double> out(f.points(), 0.0);
    std::vector<double> X(m * m * n);
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!f.sff.nu_defined[p]) continue;
        const double* nu = f.sff.nu.data() + p * n;
        for (int ij = 0; ij < m * m; ++ij)
            for (int a = 0; a < n; ++a)
                X[ij * n + a] = f.sff.a(p, ij / m, ij % m)[a] -
                                f.derived.P[p * m * m + ij] / f.sff.H_norm[p] * nu[a];
        out[p] = tensor2_norm2(X.data(), f.metric.ginv_at(p), m, n);
    }
    return out;
}

std::vector<double> lemma4_term1(const GeometryFields& f) {
    const int m = f.m();
    f.normal("lemma4_term1");
    std::vector<double> out(f.points(), 0.0);
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!f.sff.nu_defined[p]) continue;
        const auto dr = grad_ratio(f, p, nabla_P(f, p));
        const double* gi = f.metric.ginv_at(p);
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) s += gi[k * m + l] * dr[k] * dr[l];
        out[p] = s * f.derived.H2[p];
    }
    return out;
}

std::vector<double> lemma4_term2(const GeometryFields& f) {
    f.normal("lemma4_term2");
    std::vector<double> out(f.points(), 0.0);
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!f.sff.nu_defined[p]) continue;
        const double h2 = f.derived.H2[p];
        out[p] = 2.0 * f.derived.P2[p] / (h2 * h2 * h2) * t_norm2(f, p, nabla_P(f, p));
    }
    return out;
}

WeightedIntegral gaussian_weighted_integral(const GeometryFields& f, const std::vector<double>& integrand,
                                            const std::string& name, double boundary_tol) {
    const auto& grid = f.chart->grid;
    const int m = grid.dim(), n = f.n();
    WeightedIntegral w;
    w.integrand = name;
    w.h = grid.max_spacing();
    const std::size_t N = grid.size();
    std::vector<double> weighted(N, 0.0), fine, coarse;
    bool coarse_ok = true;
    for (int a = 0; a < m; ++a) {
        const Axis& ax = grid.axis(a);
        const int interior = ax.last_interior() - ax.first_interior() + 1;
        if (ax.is_periodic() ? ax.count % 2 != 0 : interior % 2 == 0) coarse_ok = false;
    }
    for (std::size_t p = 0; p < N; ++p) {
        if (!grid.is_interior(p)) continue;
        const double* F = f.chart->position(p);
        const double rho = std::exp(-0.5 * dot(F, F, n));
        const double v = integrand[p] * rho * f.metric.sqrt_det[p];
        double wt = 1.0, wt_coarse = 1.0;
        bool on_coarse = true, on_edge = false;
        for (int a = 0; a < m; ++a) {
            const Axis& ax = grid.axis(a);
            const int i = grid.index_along(p, a);
            wt *= ax.spacing;
            wt_coarse *= 2.0 * ax.spacing;
            const int rel = i - ax.first_interior();
            if (rel % 2 != 0) on_coarse = false;
            if (!ax.is_periodic() && (i == ax.first_interior() || i == ax.last_interior())) {
                wt *= 0.5;
                wt_coarse *= 0.5;
                on_edge = true;
            }
        }
        if (on_edge) w.boundary_max = std::max(w.boundary_max, std::abs(v));
        fine.push_back(wt * v);
        if (on_coarse) coarse.push_back(wt_coarse * v);
    }
    if (!grid.all_periodic() && !(w.boundary_max <= boundary_tol))
        throw Error("Gaussian-weighted integrand is " + format_double(w.boundary_max) +
                    " on the truncation boundary; enlarge the half-length");
    w.value = pairwise_sum(fine);
    if (coarse_ok) w.error_estimate = std::abs(w.value - pairwise_sum(coarse));
    return w;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::spherical: return "spherical";
        case Verdict::class_i_curve_cylinder: return "class_i_curve_cylinder";
        case Verdict::class_ii_product: return "class_ii_product";
        case Verdict::non_shrinker: return "non_shrinker";
        case Verdict::non_spherical: return "non_spherical";
        case Verdict::unknown: return "unknown";
    }
    return "?";
}

Classification classify(const GeometryFields& f, const ClassifyOptions& o) {
    Classification c;
    auto& ev = c.evidence;
    const auto& grid = f.chart->grid;
    const int m = f.m(), n = f.n();

    const auto shrink = shrinker_residual(f, o.shrinker_tol);
    ev["shrinker_max"] = shrink.max;
    ev["compact"] = o.compact;
    if (!shrink.pass) {
        c.verdict = Verdict::non_shrinker;
        c.note = "shrinker equation fails";
        return c;
    }
    double h_min = std::numeric_limits<double>::infinity(), f2_dev = 0.0, grad_h = 0.0;
    bool masked = false;
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!grid.is_interior(p)) continue;
        if (!f.sff.nu_defined[p]) masked = true;
        h_min = std::min(h_min, f.sff.H_norm[p]);
        const double* F = f.chart->position(p);
        f2_dev = std::max(f2_dev, std::abs(dot(F, F, n) - m));
    }
    ev["min_H"] = h_min;
    ev["F2_minus_m_max"] = f2_dev;
    if (masked) {
        c.verdict = Verdict::unknown;
        c.note = "|H| vanishes somewhere; principal normal undefined";
        return c;
    }
    const double nu_defect = parallel_nu_defect(f);
    ev["parallel_nu_defect"] = nu_defect;
    if (nu_defect > o.parallel_tol) {
        if (o.compact) {
            c.verdict = Verdict::non_spherical;
            c.note = "compact with non-parallel principal normal";
        } else {
            c.verdict = Verdict::unknown;
            c.note = "principal normal not parallel; classification hypotheses fail";
        }
        return c;
    }
    if (o.compact) {
        if (f2_dev <= o.sphere_tol) {
            c.verdict = Verdict::spherical;
            c.rank = m;
            c.note = "parallel principal normal and |F|^2 = m";
        } else if (m == 1) {
            c.verdict = Verdict::unknown;
            c.note = "closed curve other than the circle; sphere rigidity needs m >= 2";
        } else {
            c.verdict = Verdict::unknown;
            c.note = "contradictory evidence: compact with parallel principal normal but |F|^2 not constant";
        }
        return c;
    }

    const auto rank = principal_rank(f, o.cluster_tol);
    c.rank = rank.mode;
    ev["rank"] = rank.mode;
    ev["rank_ambiguous"] = rank.ambiguous;
    ev["eigen_min_nonzero_rel"] = rank.min_nonzero;
    ev["eigen_max_zero_rel"] = rank.max_zero;
    double h2_min = std::numeric_limits<double>::infinity(), h2_max = 0.0;
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!grid.is_interior(p)) continue;
        h2_min = std::min(h2_min, f.derived.H2[p]);
        h2_max = std::max(h2_max, f.derived.H2[p]);
        double gh = 0.0;
        for (int k = 0; k < m; ++k) gh += f.nd->grad_H_norm[p * m + k] * f.nd->grad_H_norm[p * m + k];
        grad_h = std::max(grad_h, std::sqrt(gh));
    }
    ev["H2_min"] = h2_min;
    ev["H2_max"] = h2_max;
    ev["grad_H_max"] = grad_h;
    if (rank.ambiguous || rank.mode < 1) {
        c.verdict = Verdict::unknown;
        c.note = "principal rank ambiguous";
        return c;
    }
    if (rank.mode == m) {
        if (f2_dev <= o.sphere_tol) {
            c.verdict = Verdict::spherical;
            c.note = "full rank with |F|^2 = m";
        } else {
            c.verdict = Verdict::unknown;
            c.note = "full principal rank without constant |F|^2";
        }
        return c;
    }
    HypothesisOptions hyp;
    hyp.cluster_tol = o.cluster_tol;
    const auto vanish = identity_residual(IdentityKind::vanish, f, o.vanish_tol, hyp);
    ev["vanish_max"] = vanish.max;
    if (!vanish.pass) {
        c.verdict = Verdict::unknown;
        c.note = "kernel directions of P are not flat";
        return c;
    }
    if (rank.mode == 1 && grad_h > o.parallel_tol) {
        c.verdict = Verdict::class_i_curve_cylinder;
        c.note = "one curved direction with non-constant |H|";
        return c;
    }
    const double r = rank.mode;
    if (std::abs(h2_min - r) <= o.sphere_tol && std::abs(h2_max - r) <= o.sphere_tol) {
        c.verdict = Verdict::class_ii_product;
        c.note = "|H|^2 = r on a product with flat factor";
    } else {
        c.verdict = Verdict::unknown;
        c.note = "constant-rank split found but |H|^2 differs from the rank";
    }
    return c;
}

}  // namespace shrinker
