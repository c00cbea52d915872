#include "shrinker/jet.hpp"

#include <vector>

namespace shrinker {
namespace {

struct Tables {
    std::array<std::array<int, 3>, Jet::kTerms> exps{};
    std::array<std::array<int, Jet::kTerms>, Jet::kTerms> product{};  // -1 if degree > 3

    Tables() {
        int t = 0;
        for (int deg = 0; deg <= 3; ++deg)
            for (int a = deg; a >= 0; --a)
                for (int b = deg - a; b >= 0; --b) exps[t++] = {a, b, deg - a - b};
        for (int i = 0; i < Jet::kTerms; ++i)
            for (int j = 0; j < Jet::kTerms; ++j) product[i][j] = find({exps[i][0] + exps[j][0],
                                                                        exps[i][1] + exps[j][1],
                                                                        exps[i][2] + exps[j][2]});
    }

    int find(std::array<int, 3> e) const {
        if (e[0] + e[1] + e[2] > 3) return -1;
        for (int t = 0; t < Jet::kTerms; ++t)
            if (exps[t] == e) return t;
        return -1;
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double derivative(const std::array<double, Jet::kTerms>& c, std::array<int, 3> e) {
    const int t = tables().find(e);
    return c[t] * factorial(e[0]) * factorial(e[1]) * factorial(e[2]);
}

}  // namespace

Jet Jet::variable(int var, double value) {
    Jet j(value);
    std::array<int, 3> e{0, 0, 0};
    e[var] = 1;
    j.c_[tables().find(e)] = 1.0;
    return j;
}

double Jet::d(int i) const {
    std::array<int, 3> e{0, 0, 0};
    ++e[i];
    return derivative(c_, e);
}

double Jet::d(int i, int j) const {
    std::array<int, 3> e{0, 0, 0};
    ++e[i];
    ++e[j];
    return derivative(c_, e);
}

double Jet::d(int i, int j, int k) const {
    std::array<int, 3> e{0, 0, 0};
    ++e[i];
    ++e[j];
    ++e[k];
    return derivative(c_, e);
}

Jet& Jet::operator+=(const Jet& o) {
    for (int t = 0; t < kTerms; ++t) c_[t] += o.c_[t];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    for (int t = 0; t < kTerms; ++t) c_[t] -= o.c_[t];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet& Jet::operator*=(const Jet& o) {
    const auto& prod = tables().product;
    std::array<double, kTerms> r{};
    for (int i = 0; i < kTerms; ++i) {
        if (c_[i] == 0.0) continue;
        for (int j = 0; j < kTerms; ++j) {
            const int t = prod[i][j];
            if (t >= 0) r[t] += c_[i] * o.c_[j];
        }
    }
    c_ = r;
    return *this;
}

Jet Jet::compose(const Jet& a, double f0, double f1, double f2, double f3) {
    Jet delta = a;
    delta.c_[0] = 0.0;
    const Jet d2 = delta * delta;
    const Jet d3 = d2 * delta;
    Jet r(f0);
    r += delta * f1;
    r += d2 * (f2 / 2.0);
    r += d3 * (f3 / 6.0);
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    const double v = b.value();
    const Jet inv = Jet::compose(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v), -6.0 / (v * v * v * v));
    return a * inv;
}

Jet sin(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return Jet::compose(a, s, c, -s, -c);
}

Jet cos(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return Jet::compose(a, c, -s, -c, s);
}

Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    return Jet::compose(a, e, e, e, e);
}

Jet sqrt(const Jet& a) {
    const double v = a.value(), r = std::sqrt(v);
    return Jet::compose(a, r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v));
}

}  // namespace shrinker
