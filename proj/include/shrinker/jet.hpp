#pragma once

#include <array>
#include <cmath>

namespace shrinker {

/// Truncated multivariate Taylor polynomial of total degree 3 in up to three
/// variables. Evaluating a position map on jets gives its exact partial
/// derivatives through third order, which is how closed-form charts get
/// their derivative callbacks.
class Jet {
public:
    static constexpr int kVars = 3;
    static constexpr int kTerms = 20;

    Jet() { c_.fill(0.0); }
    Jet(double v) { c_.fill(0.0); c_[0] = v; }  // NOLINT: implicit on purpose

    /// x_var + value, i.e. an independent variable seeded at `value`.
    static Jet variable(int var, double value);

    double value() const { return c_[0]; }
    double d(int i) const;
    double d(int i, int j) const;
    double d(int i, int j, int k) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator-(Jet a) { return a *= -1.0; }

    friend Jet sin(const Jet& a);
    friend Jet cos(const Jet& a);
    friend Jet exp(const Jet& a);
    friend Jet sqrt(const Jet& a);

private:
    // f(a0 + delta) from the scalar derivatives f, f', f'', f''' at a0.
    static Jet compose(const Jet& a, double f0, double f1, double f2, double f3);

    std::array<double, kTerms> c_;
};

}  // namespace shrinker
