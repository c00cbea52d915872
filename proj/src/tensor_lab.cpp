#include "shrinker/tensor_lab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "shrinker/errors.hpp"
#include "shrinker/report.hpp"

namespace shrinker {

namespace {

double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

double norm(const double* a, int n) { return std::sqrt(dot(a, a, n)); }

// out = v minus its tangential part at point p.
void project_normal(const SampledChart& c, const MetricField& g, std::size_t p, const double* v, double* out) {
    const int m = c.m, n = c.n;
    const double* gi = g.ginv_at(p);
    std::vector<double> vt(m);
    for (int j = 0; j < m; ++j) vt[j] = dot(v, c.first(p, j), n);
    std::copy_n(v, n, out);
    for (int i = 0; i < m; ++i) {
        double coef = 0.0;
        for (int j = 0; j < m; ++j) coef += gi[i * m + j] * vt[j];
        const double* Fi = c.first(p, i);
        for (int a = 0; a < n; ++a) out[a] -= coef * Fi[a];
    }
}

std::string point_label(const ParameterGrid& grid, std::size_t p) {
    std::ostringstream os;
    const auto idx = grid.multi_index(p);
    os << "(";
    for (std::size_t a = 0; a < idx.size(); ++a) os << (a ? "," : "") << idx[a];
    os << ")";
    return os.str();
}

// Index of the stencil centre used at p along `axis` for a radius-1 stencil.
std::size_t clamped_center(const ParameterGrid& grid, std::size_t p, int axis) {
    const Axis& ax = grid.axis(axis);
    if (ax.is_periodic()) return p;
    const int i = grid.index_along(p, axis);
    if (i == 0) return grid.shifted(p, axis, 1);
    if (i == ax.count - 1) return grid.shifted(p, axis, -1);
    return p;
}

}  // namespace

double tensor2_norm2(const double* T, const double* ginv, int m, int n) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const double w = ginv[i * m + a] * ginv[j * m + b];
                    if (w != 0.0) s += w * dot(T + (i * m + j) * n, T + (a * m + b) * n, n);
                }
    return s;
}

const NormalDerivativeField& GeometryFields::normal(const std::string& requester) const {
    if (!nd) throw CapabilityError(requester + " needs normal derivatives, which were not computed");
    return *nd;
}

MetricField first_fundamental(const SampledChart& c) {
    const int m = c.m, n = c.n;
    const std::size_t N = c.points();
    MetricField g;
    g.m = m;
    g.g.assign(N * m * m, 0.0);
    g.ginv.assign(N * m * m, 0.0);
    g.christoffel.assign(N * m * m * m, 0.0);
    g.sqrt_det.assign(N, 0.0);
    const bool want_d = c.has_third && c.source == DerivativeSource::analytic;
    if (want_d) g.dchristoffel.assign(N * m * m * m * m, 0.0);

    Eigen::MatrixXd G(m, m), Gi(m, m);
    for (std::size_t p = 0; p < N; ++p) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) G(i, j) = dot(c.first(p, i), c.first(p, j), n);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
        const double det = G.determinant();
        if (ldlt.info() != Eigen::Success || !(det > 0.0)) {
            if (c.grid.is_interior(p))
                throw DegenerateMetricError("metric not positive definite at grid point " +
                                            point_label(c.grid, p));
            continue;
        }
        Gi = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
        Gi = 0.5 * (Gi + Gi.transpose());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                g.g[(p * m + i) * m + j] = G(i, j);
                g.ginv[(p * m + i) * m + j] = Gi(i, j);
            }
        g.sqrt_det[p] = std::sqrt(det);

        // Gamma^k_ij = g^kl <F_ij, F_l>
        std::vector<double> first_kind(m * m * m);  // [i][j][l]
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l) first_kind[(i * m + j) * m + l] = dot(c.second(p, i, j), c.first(p, l), n);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < m; ++l) s += Gi(k, l) * first_kind[(i * m + j) * m + l];
                    g.christoffel[((p * m + k) * m + i) * m + j] = s;
                }
        if (!want_d) continue;
        // d_l g_ab and d_l g^kq
        std::vector<double> dg(m * m * m), dgi(m * m * m);  // [l][a][b]
        for (int l = 0; l < m; ++l)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    dg[(l * m + a) * m + b] =
                        dot(c.second(p, a, l), c.first(p, b), n) + dot(c.first(p, a), c.second(p, b, l), n);
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k)
                for (int q = 0; q < m; ++q) {
                    double s = 0.0;
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b) s -= Gi(k, a) * dg[(l * m + a) * m + b] * Gi(b, q);
                    dgi[(l * m + k) * m + q] = s;
                }
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double s = 0.0;
                        for (int q = 0; q < m; ++q) {
                            const double d_first = dot(c.third(p, i, j, l), c.first(p, q), n) +
                                                   dot(c.second(p, i, j), c.second(p, q, l), n);
                            s += dgi[(l * m + k) * m + q] * first_kind[(i * m + j) * m + q] + Gi(k, q) * d_first;
                        }
                        g.dchristoffel[(((p * m + l) * m + k) * m + i) * m + j] = s;
                    }
    }
    return g;
}

SFFField second_fundamental(const SampledChart& c, const MetricField& g, double h_rel) {
    const int m = c.m, n = c.n;
    const std::size_t N = c.points();
    SFFField s;
    s.m = m;
    s.n = n;
    s.A.assign(N * m * m * n, 0.0);
    s.H.assign(N * n, 0.0);
    s.H_norm.assign(N, 0.0);
    s.nu.assign(N * n, 0.0);
    s.nu_defined.assign(N, 0);
    s.theta.assign(N * m, 0.0);
    s.F_tan.assign(N * n, 0.0);
    s.F_perp.assign(N * n, 0.0);
    double hmax = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
        const double* gi = g.ginv_at(p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double* A = s.A.data() + ((p * m + i) * m + j) * n;
                std::copy_n(c.second(p, i, j), n, A);
                for (int k = 0; k < m; ++k) {
                    const double G = g.gamma(p, k, i, j);
                    const double* Fk = c.first(p, k);
                    for (int a = 0; a < n; ++a) A[a] -= G * Fk[a];
                }
            }
        double* H = s.H.data() + p * n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double w = gi[i * m + j];
                const double* A = s.a(p, i, j);
                for (int a = 0; a < n; ++a) H[a] += w * A[a];
            }
        s.H_norm[p] = norm(H, n);
        if (c.grid.is_interior(p)) hmax = std::max(hmax, s.H_norm[p]);

        const double* F = c.position(p);
        for (int i = 0; i < m; ++i) s.theta[p * m + i] = dot(F, c.first(p, i), n);
        double* Ft = s.F_tan.data() + p * n;
        for (int i = 0; i < m; ++i) {
            double coef = 0.0;
            for (int j = 0; j < m; ++j) coef += gi[i * m + j] * s.theta[p * m + j];
            for (int a = 0; a < n; ++a) Ft[a] += coef * c.first(p, i)[a];
        }
        for (int a = 0; a < n; ++a) s.F_perp[p * n + a] = F[a] - Ft[a];
    }
    s.h_threshold = h_rel * hmax;
    for (std::size_t p = 0; p < N; ++p) {
        if (s.H_norm[p] > s.h_threshold && s.H_norm[p] > 0.0) {
            s.nu_defined[p] = 1;
            for (int a = 0; a < n; ++a) s.nu[p * n + a] = s.H[p * n + a] / s.H_norm[p];
        }
    }
    return s;
}

DerivedField derived_tensors(const SFFField& s, const MetricField& g) {
    const int m = s.m, n = s.n;
    const std::size_t N = s.H_norm.size();
    const int m2 = m * m, m4 = m2 * m2;
    DerivedField d;
    d.m = m;
    d.n = n;
    d.P.assign(N * m2, 0.0);
    d.Q.assign(N * m2, 0.0);
    d.ricci.assign(N * m2, 0.0);
    d.S.assign(N * m4, 0.0);
    d.riemann.assign(N * m4, 0.0);
    d.rperp.assign(N * n * n * m2, 0.0);
    for (auto* v : {&d.A2, &d.H2, &d.P2, &d.Q2, &d.S2, &d.PQ, &d.rperp2, &d.rperp2_direct}) v->assign(N, 0.0);

    std::vector<double> Araised(m2 * n), Sup(m4), tmp(m4);
    for (std::size_t p = 0; p < N; ++p) {
        const double* gi = g.ginv_at(p);
        const double* H = s.H.data() + p * n;
        double* P = d.P.data() + p * m2;
        double* Q = d.Q.data() + p * m2;
        double* S = d.S.data() + p * m4;
        double* R = d.riemann.data() + p * m4;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                P[i * m + j] = dot(H, s.a(p, i, j), n);
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) S[((i * m + j) * m + k) * m + l] = dot(s.a(p, i, j), s.a(p, k, l), n);
            }
        // A^k_j = g^ki A_ij, stored [k][j]
        std::fill(Araised.begin(), Araised.end(), 0.0);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < m; ++j)
                for (int i = 0; i < m; ++i)
                    for (int a = 0; a < n; ++a) Araised[(k * m + j) * n + a] += gi[k * m + i] * s.a(p, i, j)[a];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double q = 0.0;
                for (int k = 0; k < m; ++k) q += dot(Araised.data() + (k * m + i) * n, s.a(p, k, j), n);
                Q[i * m + j] = q;
            }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        R[((i * m + j) * m + k) * m + l] =
                            S[((i * m + k) * m + j) * m + l] - S[((i * m + l) * m + j) * m + k];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double r = 0.0;
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) r += gi[k * m + l] * R[((i * m + k) * m + j) * m + l];
                d.ricci[(p * m + i) * m + j] = r;
            }

        auto norm2 = [&](const double* X, const double* Y) {
            double t = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int a = 0; a < m; ++a)
                        for (int b = 0; b < m; ++b) t += gi[i * m + a] * gi[j * m + b] * X[i * m + j] * Y[a * m + b];
            return t;
        };
        d.H2[p] = dot(H, H, n);
        d.P2[p] = norm2(P, P);
        d.Q2[p] = norm2(Q, Q);
        d.PQ[p] = norm2(P, Q);
        // S^{ijkl}: raise one slot at a time.
        std::copy_n(S, m4, Sup.data());
        for (int slot = 0; slot < 4; ++slot) {
            std::fill(tmp.begin(), tmp.end(), 0.0);
            for (int idx = 0; idx < m4; ++idx) {
                int e[4] = {idx / (m * m2), (idx / m2) % m, (idx / m) % m, idx % m};
                const int keep = e[slot];
                for (int r = 0; r < m; ++r) {
                    e[slot] = r;
                    const int src = ((e[0] * m + e[1]) * m + e[2]) * m + e[3];
                    tmp[idx] += gi[keep * m + r] * Sup[src];
                }
            }
            std::swap(Sup, tmp);
        }
        double s2 = 0.0, sx = 0.0, a2 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        s2 += S[((i * m + j) * m + k) * m + l] * Sup[((i * m + j) * m + k) * m + l];
                        sx += S[((i * m + k) * m + j) * m + l] * Sup[((i * m + j) * m + k) * m + l];
                    }
                a2 += gi[i * m + j] * Q[i * m + j];
            }
        d.S2[p] = s2;
        d.A2[p] = a2;
        d.rperp2[p] = 2.0 * d.Q2[p] - 2.0 * sx;

        // M^{ab}_ij = A^a_ik A^{bk}_j - A^b_ik A^{ak}_j
        double* M = d.rperp.data() + p * n * n * m2;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double v = 0.0;
                        for (int k = 0; k < m; ++k)
                            v += s.a(p, i, k)[a] * Araised[(k * m + j) * n + b] -
                                 s.a(p, i, k)[b] * Araised[(k * m + j) * n + a];
                        M[((a * n + b) * m + i) * m + j] = v;
                    }
        double direct = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) direct += norm2(M + (a * n + b) * m2, M + (a * n + b) * m2);
        d.rperp2_direct[p] = direct;
    }
    return d;
}

namespace {

// Unit normal orthogonal to nu, oriented so that (F_1..F_m, nu, b) is positive.
void fill_binormal(const SampledChart& c, const MetricField& g, const SFFField& s, DerivedField& d) {
    const int m = c.m, n = c.n;
    if (n - m != 2) return;
    const std::size_t N = c.points();
    d.has_binormal = true;
    d.binormal.assign(N * n, 0.0);
    std::vector<double> e(n), v(n), best(n);
    Eigen::MatrixXd frame(n, n);
    for (std::size_t p = 0; p < N; ++p) {
        if (!s.nu_defined[p]) continue;
        const double* nu = s.nu.data() + p * n;
        double best_norm = -1.0;
        for (int a = 0; a < n; ++a) {
            std::fill(e.begin(), e.end(), 0.0);
            e[a] = 1.0;
            project_normal(c, g, p, e.data(), v.data());
            const double c_nu = dot(v.data(), nu, n);
            for (int k = 0; k < n; ++k) v[k] -= c_nu * nu[k];
            const double len = norm(v.data(), n);
            if (len > best_norm) {
                best_norm = len;
                for (int k = 0; k < n; ++k) best[k] = v[k] / len;
            }
        }
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) frame(a, i) = c.first(p, i)[a];
        for (int a = 0; a < n; ++a) {
            frame(a, m) = nu[a];
            frame(a, m + 1) = best[a];
        }
        const double sign = frame.determinant() < 0.0 ? -1.0 : 1.0;
        for (int a = 0; a < n; ++a) d.binormal[p * n + a] = sign * best[a];
    }
}

}  // namespace

std::vector<double> scalar_laplacian(const ParameterGrid& grid, const MetricField& g,
                                     const std::vector<double>& f) {
    const int m = grid.dim();
    const std::size_t N = grid.size();
    std::vector<double> out(N, 0.0);
    std::vector<double> w(N);
    for (int i = 0; i < m; ++i) {
        const double h = grid.axis(i).spacing;
        for (std::size_t p = 0; p < N; ++p) w[p] = g.sqrt_det[p] * g.ginv[(p * m + i) * m + i];
        for (std::size_t p = 0; p < N; ++p) {
            const std::size_t q = clamped_center(grid, p, i);
            const std::size_t qp = grid.shifted(q, i, 1), qm = grid.shifted(q, i, -1);
            const double wp = 0.5 * (w[q] + w[qp]), wm = 0.5 * (w[q] + w[qm]);
            out[p] += (wp * (f[qp] - f[q]) - wm * (f[q] - f[qm])) / (h * h);
        }
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const auto dj = fd::first(grid, f, 1, j);
            std::vector<double> flux(N);
            for (std::size_t p = 0; p < N; ++p) flux[p] = g.sqrt_det[p] * g.ginv[(p * m + i) * m + j] * dj[p];
            const auto di = fd::first(grid, flux, 1, i);
            for (std::size_t p = 0; p < N; ++p) out[p] += di[p];
        }
    }
    for (std::size_t p = 0; p < N; ++p) out[p] = g.sqrt_det[p] > 0.0 ? out[p] / g.sqrt_det[p] : 0.0;
    return out;
}

NormalDerivativeField normal_derivatives(const SampledChart& c, const MetricField& g, const SFFField& s,
                                         const DerivedField& d) {
    const int m = c.m, n = c.n;
    const std::size_t N = c.points();
    const int m2 = m * m, m3 = m2 * m;
    const bool analytic = c.source == DerivativeSource::analytic;
    if (analytic && !c.has_third)
        throw CapabilityError("normal derivatives of A need third derivatives; chart has none");

    NormalDerivativeField nd;
    nd.m = m;
    nd.n = n;
    nd.nabla_A.assign(N * m3 * n, 0.0);

    // Raw parameter derivatives d_k A_ij, [p][k][i][j][alpha].
    std::vector<double> dA(N * m3 * n, 0.0);
    if (analytic) {
        for (std::size_t p = 0; p < N; ++p)
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double* out = dA.data() + (((p * m + k) * m + i) * m + j) * n;
                        std::copy_n(c.third(p, i, j, k), n, out);
                        for (int l = 0; l < m; ++l) {
                            const double dG = g.dchristoffel[(((p * m + k) * m + l) * m + i) * m + j];
                            const double G = g.gamma(p, l, i, j);
                            for (int a = 0; a < n; ++a)
                                out[a] -= dG * c.first(p, l)[a] + G * c.second(p, l, k)[a];
                        }
                    }
    } else {
        for (int k = 0; k < m; ++k) {
            const auto dk = fd::first(c.grid, s.A, m2 * n, k);
            for (std::size_t p = 0; p < N; ++p)
                std::copy_n(dk.data() + p * m2 * n, m2 * n, dA.data() + (p * m + k) * m2 * n);
        }
    }
    for (std::size_t p = 0; p < N; ++p)
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const std::size_t off = (((p * m + k) * m + i) * m + j) * n;
                    double* out = nd.nabla_A.data() + off;
                    project_normal(c, g, p, dA.data() + off, out);
                    for (int l = 0; l < m; ++l) {
                        const double Gki = g.gamma(p, l, k, i), Gkj = g.gamma(p, l, k, j);
                        for (int a = 0; a < n; ++a) out[a] -= Gki * s.a(p, l, j)[a] + Gkj * s.a(p, i, l)[a];
                    }
                }
    auto nablaA = [&](std::size_t p, int k, int i, int j) {
        return nd.nabla_A.data() + (((p * m + k) * m + i) * m + j) * n;
    };

    nd.nabla_H.assign(N * m * n, 0.0);
    nd.nabla_nu.assign(N * m * n, 0.0);
    nd.grad_H_norm.assign(N * m, 0.0);
    nd.nablaA2.assign(N, 0.0);
    nd.nablaH2.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) {
        const double* gi = g.ginv_at(p);
        for (int k = 0; k < m; ++k) {
            double* dH = nd.nabla_H.data() + (p * m + k) * n;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int a = 0; a < n; ++a) dH[a] += gi[i * m + j] * nablaA(p, k, i, j)[a];
            if (s.nu_defined[p]) {
                const double* nu = s.nu.data() + p * n;
                const double gh = dot(nu, dH, n);
                nd.grad_H_norm[p * m + k] = gh;
                for (int a = 0; a < n; ++a)
                    nd.nabla_nu[(p * m + k) * n + a] = (dH[a] - gh * nu[a]) / s.H_norm[p];
            }
        }
        double h2 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                h2 += gi[i * m + j] * dot(nd.nabla_H.data() + (p * m + i) * n, nd.nabla_H.data() + (p * m + j) * n, n);
        nd.nablaH2[p] = h2;
        double a2 = 0.0;
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int k2 = 0; k2 < m; ++k2)
                        for (int i2 = 0; i2 < m; ++i2)
                            for (int j2 = 0; j2 < m; ++j2) {
                                const double w = gi[k * m + k2] * gi[i * m + i2] * gi[j * m + j2];
                                if (w != 0.0) a2 += w * dot(nablaA(p, k, i, j), nablaA(p, k2, i2, j2), n);
                            }
        nd.nablaA2[p] = a2;
    }

    // nabla_i theta_j = d_i theta_j - Gamma^k_ij theta_k
    nd.nabla_theta.assign(N * m2, 0.0);
    std::vector<std::vector<double>> dtheta;
    if (!analytic)
        for (int i = 0; i < m; ++i) dtheta.push_back(fd::first(c.grid, s.theta, m, i));
    for (std::size_t p = 0; p < N; ++p)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double v = analytic ? g.g_at(p)[i * m + j] + dot(c.position(p), c.second(p, i, j), n)
                                    : dtheta[i][p * m + j];
                for (int k = 0; k < m; ++k) v -= g.gamma(p, k, i, j) * s.theta[p * m + k];
                nd.nabla_theta[(p * m + i) * m + j] = v;
            }

    // Second normal derivatives by differencing the first ones.
    nd.hess_H.assign(N * m2 * n, 0.0);
    nd.lap_H_perp.assign(N * n, 0.0);
    std::vector<double> tmp(n);
    for (int i = 0; i < m; ++i) {
        const auto Di = fd::first(c.grid, nd.nabla_H, m * n, i);
        for (std::size_t p = 0; p < N; ++p)
            for (int j = 0; j < m; ++j) {
                double* out = nd.hess_H.data() + ((p * m + i) * m + j) * n;
                project_normal(c, g, p, Di.data() + (p * m + j) * n, out);
                for (int k = 0; k < m; ++k) {
                    const double G = g.gamma(p, k, i, j);
                    for (int a = 0; a < n; ++a) out[a] -= G * nd.nabla_H[(p * m + k) * n + a];
                }
            }
    }
    nd.lap_A.assign(N * m2 * n, 0.0);
    for (int k = 0; k < m; ++k) {
        const auto Ek = fd::first(c.grid, nd.nabla_A, m3 * n, k);
        for (std::size_t p = 0; p < N; ++p) {
            const double* gi = g.ginv_at(p);
            for (int l = 0; l < m; ++l) {
                const double w = gi[k * m + l];
                if (w == 0.0) continue;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        project_normal(c, g, p, Ek.data() + (((p * m + l) * m + i) * m + j) * n, tmp.data());
                        for (int q = 0; q < m; ++q) {
                            const double Gkl = g.gamma(p, q, k, l), Gki = g.gamma(p, q, k, i),
                                         Gkj = g.gamma(p, q, k, j);
                            for (int a = 0; a < n; ++a)
                                tmp[a] -= Gkl * nablaA(p, q, i, j)[a] + Gki * nablaA(p, l, q, j)[a] +
                                          Gkj * nablaA(p, l, i, q)[a];
                        }
                        double* out = nd.lap_A.data() + ((p * m + i) * m + j) * n;
                        for (int a = 0; a < n; ++a) out[a] += w * tmp[a];
                    }
            }
        }
    }
    for (std::size_t p = 0; p < N; ++p) {
        const double* gi = g.ginv_at(p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int a = 0; a < n; ++a)
                    nd.lap_H_perp[p * n + a] += gi[i * m + j] * nd.hess_H[((p * m + i) * m + j) * n + a];
    }

    std::vector<double> F2(N);
    for (std::size_t p = 0; p < N; ++p) F2[p] = dot(c.position(p), c.position(p), n);
    nd.lap_A2 = scalar_laplacian(c.grid, g, d.A2);
    nd.lap_H2 = scalar_laplacian(c.grid, g, d.H2);
    nd.lap_H_norm = scalar_laplacian(c.grid, g, s.H_norm);
    nd.lap_F2 = scalar_laplacian(c.grid, g, F2);

    if (d.has_binormal) {
        nd.has_torsion = true;
        nd.tau.assign(N * m, 0.0);
        for (std::size_t p = 0; p < N; ++p)
            if (s.nu_defined[p])
                for (int i = 0; i < m; ++i)
                    nd.tau[p * m + i] = dot(nd.nabla_nu.data() + (p * m + i) * n, d.binormal.data() + p * n, n);
        nd.dtau.assign(N * m2, 0.0);
        for (int i = 0; i < m; ++i) {
            const auto di = fd::first(c.grid, nd.tau, m, i);
            for (std::size_t p = 0; p < N; ++p)
                for (int j = 0; j < m; ++j) {
                    nd.dtau[(p * m + i) * m + j] += di[p * m + j];
                    nd.dtau[(p * m + j) * m + i] -= di[p * m + j];
                }
        }
    }
    return nd;
}

GeometryFields compute_fields(const SampledChart& chart, const FieldOptions& options) {
    GeometryFields f;
    f.chart = &chart;
    f.metric = first_fundamental(chart);
    f.sff = second_fundamental(chart, f.metric, options.h_rel);
    f.derived = derived_tensors(f.sff, f.metric);
    fill_binormal(chart, f.metric, f.sff, f.derived);
    const bool can = chart.source == DerivativeSource::finite_difference || chart.has_third;
    if (options.normal_derivatives && can) f.nd = normal_derivatives(chart, f.metric, f.sff, f.derived);
    return f;
}

std::vector<double> intrinsic_riemann(const SampledChart& c, const MetricField& g) {
    const int m = c.m;
    const std::size_t N = c.points();
    const int m3 = m * m * m, m4 = m3 * m;
    // dG[p][l][k][i][j] = d_l Gamma^k_ij
    std::vector<double> dG;
    if (!g.dchristoffel.empty()) {
        dG = g.dchristoffel;
    } else {
        dG.assign(N * m4, 0.0);
        for (int l = 0; l < m; ++l) {
            const auto dl = fd::first(c.grid, g.christoffel, m3, l);
            for (std::size_t p = 0; p < N; ++p) std::copy_n(dl.data() + p * m3, m3, dG.data() + (p * m + l) * m3);
        }
    }
    auto dGam = [&](std::size_t p, int l, int k, int i, int j) { return dG[(((p * m + l) * m + k) * m + i) * m + j]; };
    std::vector<double> R(N * m4, 0.0);
    std::vector<double> Rup(m4);  // [q][i][j][l] = (R(d_i,d_j)d_l)^q
    for (std::size_t p = 0; p < N; ++p) {
        for (int q = 0; q < m; ++q)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int l = 0; l < m; ++l) {
                        double v = dGam(p, i, q, j, l) - dGam(p, j, q, i, l);
                        for (int r = 0; r < m; ++r)
                            v += g.gamma(p, r, j, l) * g.gamma(p, q, i, r) - g.gamma(p, r, i, l) * g.gamma(p, q, j, r);
                        Rup[((q * m + i) * m + j) * m + l] = v;
                    }
        const double* gg = g.g_at(p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        double v = 0.0;
                        for (int q = 0; q < m; ++q) v += gg[k * m + q] * Rup[((q * m + i) * m + j) * m + l];
                        R[p * m4 + ((i * m + j) * m + k) * m + l] = v;
                    }
    }
    return R;
}

StructureKind parse_structure_kind(const std::string& name) {
    for (auto k : {StructureKind::gauss, StructureKind::codazzi, StructureKind::ricci, StructureKind::ricci_trace,
                   StructureKind::simons_scalar, StructureKind::normality, StructureKind::rperp_norm,
                   StructureKind::torsion})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown structure identity: " + name);
}

std::string to_string(StructureKind k) {
    switch (k) {
        case StructureKind::gauss: return "gauss";
        case StructureKind::codazzi: return "codazzi";
        case StructureKind::ricci: return "ricci";
        case StructureKind::ricci_trace: return "ricci_trace";
        case StructureKind::simons_scalar: return "simons_scalar";
        case StructureKind::normality: return "normality";
        case StructureKind::rperp_norm: return "rperp_norm";
        case StructureKind::torsion: return "torsion";
    }
    return "?";
}

bool is_algebraic(StructureKind k, const SampledChart& chart) {
    switch (k) {
        case StructureKind::normality:
        case StructureKind::rperp_norm:
        case StructureKind::ricci_trace: return true;
        case StructureKind::gauss:
        case StructureKind::codazzi: return chart.source == DerivativeSource::analytic && chart.has_third;
        default: return false;
    }
}

ResidualField structure_field(StructureKind kind, const GeometryFields& f) {
    const SampledChart& c = *f.chart;
    const int m = c.m, n = c.n, m2 = m * m, m4 = m2 * m2;
    const std::size_t N = c.points();
    ResidualField r;
    r.identity = to_string(kind);
    r.values.assign(N, 0.0);
    r.valid.assign(N, 1);
    const auto& s = f.sff;
    const auto& d = f.derived;
    switch (kind) {
        case StructureKind::normality:
            for (std::size_t p = 0; p < N; ++p)
                for (int k = 0; k < m; ++k)
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j)
                            r.values[p] = std::max(r.values[p], std::abs(dot(c.first(p, k), s.a(p, i, j), n)));
            break;
        case StructureKind::rperp_norm:
            for (std::size_t p = 0; p < N; ++p) r.values[p] = std::abs(d.rperp2_direct[p] - d.rperp2[p]);
            break;
        case StructureKind::ricci_trace:
            for (std::size_t p = 0; p < N; ++p)
                for (int ij = 0; ij < m2; ++ij)
                    r.values[p] = std::max(r.values[p], std::abs(d.ricci[p * m2 + ij] - d.P[p * m2 + ij] +
                                                                 d.Q[p * m2 + ij]));
            break;
        case StructureKind::gauss: {
            if (c.source == DerivativeSource::analytic && !c.has_third)
                throw CapabilityError("gauss needs third derivatives for the intrinsic curvature");
            const auto R = intrinsic_riemann(c, f.metric);
            for (std::size_t p = 0; p < N; ++p)
                for (int q = 0; q < m4; ++q)
                    r.values[p] = std::max(r.values[p], std::abs(R[p * m4 + q] - d.riemann[p * m4 + q]));
            break;
        }
        case StructureKind::codazzi: {
            const auto& nd = f.normal("codazzi");
            for (std::size_t p = 0; p < N; ++p)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int k = 0; k < m; ++k) {
                            const double* a = nd.nabla_A.data() + (((p * m + i) * m + j) * m + k) * n;
                            const double* b = nd.nabla_A.data() + (((p * m + j) * m + i) * m + k) * n;
                            double e = 0.0;
                            for (int x = 0; x < n; ++x) e += (a[x] - b[x]) * (a[x] - b[x]);
                            r.values[p] = std::max(r.values[p], std::sqrt(e));
                        }
            break;
        }
        case StructureKind::ricci: {
            // For xi = e^perp, nabla_i xi = -<e, F^k> A_ik; compare the commutator
            // of normal derivatives against the curvature 2-form applied to xi.
            std::vector<double> omega(N * n * m * n, 0.0);  // [p][e][i][alpha]
            std::vector<double> xi(N * n * n, 0.0);         // [p][e][alpha]
            std::vector<double> unit(n, 0.0);
            for (std::size_t p = 0; p < N; ++p) {
                const double* gi = f.metric.ginv_at(p);
                for (int e = 0; e < n; ++e) {
                    std::fill(unit.begin(), unit.end(), 0.0);
                    unit[e] = 1.0;
                    project_normal(c, f.metric, p, unit.data(), xi.data() + (p * n + e) * n);
                    for (int k = 0; k < m; ++k) {
                        double ek = 0.0;
                        for (int l = 0; l < m; ++l) ek += gi[k * m + l] * c.first(p, l)[e];
                        for (int i = 0; i < m; ++i)
                            for (int a = 0; a < n; ++a) omega[((p * n + e) * m + i) * n + a] -= ek * s.a(p, i, k)[a];
                    }
                }
            }
            std::vector<std::vector<double>> D(m);
            for (int i = 0; i < m; ++i) D[i] = fd::first(c.grid, omega, n * m * n, i);
            std::vector<double> diff(n), comm(n);
            for (std::size_t p = 0; p < N; ++p)
                for (int e = 0; e < n; ++e)
                    for (int i = 0; i < m; ++i)
                        for (int j = i + 1; j < m; ++j) {
                            for (int a = 0; a < n; ++a)
                                diff[a] = D[i][((p * n + e) * m + j) * n + a] - D[j][((p * n + e) * m + i) * n + a];
                            project_normal(c, f.metric, p, diff.data(), comm.data());
                            const double* M = d.rperp.data() + p * n * n * m2;
                            double err = 0.0;
                            for (int a = 0; a < n; ++a) {
                                double mx = 0.0;
                                for (int b = 0; b < n; ++b) mx += M[((a * n + b) * m + i) * m + j] * xi[(p * n + e) * n + b];
                                err += (comm[a] - mx) * (comm[a] - mx);
                            }
                            r.values[p] = std::max(r.values[p], std::sqrt(err));
                        }
            break;
        }
        case StructureKind::simons_scalar: {
            const auto& nd = f.normal("simons_scalar");
            for (std::size_t p = 0; p < N; ++p) {
                const double* gi = f.metric.ginv_at(p);
                double lhs = 0.0;
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        for (int a = 0; a < m; ++a)
                            for (int b = 0; b < m; ++b)
                                lhs += 2.0 * gi[k * m + a] * gi[l * m + b] *
                                       dot(s.a(p, a, b), nd.hess_H.data() + ((p * m + k) * m + l) * n, n);
                const double rhs = nd.lap_A2[p] - 2.0 * nd.nablaA2[p] + 2.0 * d.S2[p] - 2.0 * d.PQ[p] +
                                   2.0 * d.rperp2[p];
                r.values[p] = std::abs(lhs - rhs);
            }
            break;
        }
        case StructureKind::torsion: {
            const auto& nd = f.normal("torsion");
            if (!nd.has_torsion) throw CapabilityError("torsion is defined in codimension 2 only");
            for (std::size_t p = 0; p < N; ++p) {
                if (!s.nu_defined[p]) {
                    r.valid[p] = 0;
                    continue;
                }
                const double* M = d.rperp.data() + p * n * n * m2;
                const double* b = d.binormal.data() + p * n;
                const double* nu = s.nu.data() + p * n;
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double bmn = 0.0;
                        for (int a = 0; a < n; ++a)
                            for (int e = 0; e < n; ++e) bmn += b[a] * M[((a * n + e) * m + i) * m + j] * nu[e];
                        r.values[p] = std::max(r.values[p], std::abs(nd.dtau[(p * m + i) * m + j] - bmn));
                    }
            }
            break;
        }
    }
    return r;
}

ResidualReport summarize(const ResidualField& field, const ParameterGrid& grid, double tolerance) {
    ResidualReport r;
    r.identity = field.identity;
    r.h = grid.max_spacing();
    r.tolerance = tolerance;
    std::vector<double> vals;
    std::size_t interior = 0;
    bool bad = false;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!grid.is_interior(p)) continue;
        ++interior;
        if (!field.valid[p]) continue;
        const double v = field.values[p];
        if (!std::isfinite(v)) bad = true;
        vals.push_back(v);
    }
    r.mask_fraction = interior ? 1.0 - static_cast<double>(vals.size()) / static_cast<double>(interior) : 1.0;
    r.mask_warning = r.mask_fraction > 0.5;
    if (vals.empty()) {
        r.pass = true;
        r.note = "hypothesis holds at no interior point";
        return r;
    }
    if (bad) {
        r.max = std::numeric_limits<double>::quiet_NaN();
        r.mean = r.max;
        r.pass = false;
        r.note = "non-finite residual";
        return r;
    }
    r.max = *std::max_element(vals.begin(), vals.end());
    r.mean = pairwise_sum(vals) / static_cast<double>(vals.size());
    r.pass = r.max <= tolerance;
    if (r.mask_warning) r.note = "hypothesis mask covers more than half of the interior";
    return r;
}

ResidualReport structure_residual(StructureKind kind, const GeometryFields& fields, double tolerance) {
    return summarize(structure_field(kind, fields), fields.chart->grid, tolerance);
}

std::optional<double> convergence_order(const std::vector<ResidualReport>& reports) {
    if (reports.size() < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : reports) {
        if (!(r.max > 0.0) || !(r.h > 0.0) || !std::isfinite(r.max)) return std::nullopt;
        const double x = std::log(r.h), y = std::log(r.max);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(reports.size());
    const double den = k * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) return std::nullopt;
    return (k * sxy - sx * sy) / den;
}

std::string residual_report_json(const ResidualReport& r) {
    return dump_json(residual_report_object(r));
}

nlohmann::ordered_json residual_report_object(const ResidualReport& r) {
    nlohmann::ordered_json j;
    j["identity"] = r.identity;
    j["h"] = r.h;
    j["max"] = r.max;
    j["mean"] = r.mean;
    j["order"] = r.order ? nlohmann::ordered_json(*r.order) : nlohmann::ordered_json(nullptr);
    j["pass"] = r.pass;
    return j;
}

void write_residual_columns(const ResidualField& field, const ParameterGrid& grid, std::ostream& os) {
    os << "#";
    for (int a = 0; a < grid.dim(); ++a) os << " i" << a;
    os << " valid " << field.identity << '\n';
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto idx = grid.multi_index(p);
        for (int a = 0; a < grid.dim(); ++a) os << (a ? " " : "") << idx[a];
        os << ' ' << int(field.valid[p]) << ' ' << format_double(field.values[p]) << '\n';
    }
}

}  // namespace shrinker
