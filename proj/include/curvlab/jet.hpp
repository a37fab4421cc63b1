#pragma once

// Truncated-Taylor (jet) arithmetic in one variable.
//
// A Jet stores a scalar function of t through its value and first K
// derivatives at a sample point: coeffs[j] = d^j phi / dt^j (t0).
// Products use the Leibniz rule, (xy)^(j) = sum_i C(j,i) x^(i) y^(j-i);
// division, sqrt and real powers use the matching triangular recurrences,
// so every coefficient is exact up to floating-point rounding.
//
// Jets are immutable values. Combining jets with different base points or
// different orders is a hard error; where an algorithm genuinely needs to
// drop orders (frame derivatives do), it calls truncated() explicitly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>

#include "curvlab/errors.hpp"

namespace curvlab {

inline constexpr int kMaxJetOrder = 7;

namespace detail {

// Pascal's triangle through kMaxJetOrder.
inline constexpr std::array<std::array<double, kMaxJetOrder + 1>, kMaxJetOrder + 1>
make_binomials() {
    std::array<std::array<double, kMaxJetOrder + 1>, kMaxJetOrder + 1> b{};
    for (int n = 0; n <= kMaxJetOrder; ++n) {
        b[n][0] = 1.0;
        for (int k = 1; k <= n; ++k)
            b[n][k] = b[n - 1][k - 1] + (k <= n - 1 ? b[n - 1][k] : 0.0);
    }
    return b;
}

inline constexpr auto kBinomial = make_binomials();

inline constexpr std::array<double, kMaxJetOrder + 1> make_factorials() {
    std::array<double, kMaxJetOrder + 1> f{};
    f[0] = 1.0;
    for (int n = 1; n <= kMaxJetOrder; ++n) f[n] = f[n - 1] * n;
    return f;
}

inline constexpr auto kFactorial = make_factorials();

} // namespace detail

class Jet {
public:
    Jet() = default;

    /// Constant function c, known at t0 through `order` derivatives.
    static Jet constant(double c, double t0, int order) {
        check_order(order);
        Jet j;
        j.base_ = t0;
        j.order_ = order;
        j.c_[0] = c;
        return j;
    }

    /// The coordinate t itself: value t0, first derivative 1.
    static Jet coordinate(double t0, int order) {
        if (order < 1)
            throw OrderExhausted("jet coordinate needs order >= 1 to carry dt/dt");
        check_order(order);
        Jet j;
        j.base_ = t0;
        j.order_ = order;
        j.c_[0] = t0;
        j.c_[1] = 1.0;
        return j;
    }

    /// A constant with the same base point and order as `proto`.
    static Jet like(const Jet& proto, double c) {
        return constant(c, proto.base_, proto.order_);
    }

    double base_point() const { return base_; }
    int order() const { return order_; }
    double value() const { return c_[0]; }

    double coeff(int j) const {
        if (j < 0 || j > order_)
            throw OrderExhausted("jet coefficient " + std::to_string(j) +
                                 " requested, order is " + std::to_string(order_));
        return c_[static_cast<std::size_t>(j)];
    }

    /// Explicit truncation to a lower order. The only sanctioned way to
    /// mix jets whose budgets differ.
    Jet truncated(int new_order) const {
        if (new_order < 0 || new_order > order_)
            throw OrderExhausted("cannot truncate order " + std::to_string(order_) +
                                 " jet to order " + std::to_string(new_order));
        Jet r;
        r.base_ = base_;
        r.order_ = new_order;
        for (int j = 0; j <= new_order; ++j) r.c_[static_cast<std::size_t>(j)] = c_[static_cast<std::size_t>(j)];
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (int j = 0; j <= order_; ++j) m = std::max(m, std::abs(c_[static_cast<std::size_t>(j)]));
        return m;
    }

    /// Largest coefficient magnitude through order `upto` (clamped).
    double max_abs_coeff_through(int upto) const {
        double m = 0.0;
        const int hi = std::min(upto, order_);
        for (int j = 0; j <= hi; ++j) m = std::max(m, std::abs(c_[static_cast<std::size_t>(j)]));
        return m;
    }

    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (int j = 0; j <= a.order_; ++j) r.c_[static_cast<std::size_t>(j)] = -r.c_[static_cast<std::size_t>(j)];
        return r;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        require_compatible(a, b);
        Jet r = a;
        for (int j = 0; j <= a.order_; ++j) r.c_[static_cast<std::size_t>(j)] += b.c_[static_cast<std::size_t>(j)];
        return r;
    }

    friend Jet operator-(const Jet& a, const Jet& b) {
        require_compatible(a, b);
        Jet r = a;
        for (int j = 0; j <= a.order_; ++j) r.c_[static_cast<std::size_t>(j)] -= b.c_[static_cast<std::size_t>(j)];
        return r;
    }

    // Leibniz product. Terms are paired symmetrically so that a*b and b*a
    // evaluate to bitwise-identical coefficients.
    friend Jet operator*(const Jet& a, const Jet& b) {
        require_compatible(a, b);
        Jet r;
        r.base_ = a.base_;
        r.order_ = a.order_;
        for (int j = 0; j <= a.order_; ++j) {
            double s = 0.0;
            for (int i = 0; 2 * i < j; ++i)
                s += detail::kBinomial[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                     (a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j - i)] +
                      a.c_[static_cast<std::size_t>(j - i)] * b.c_[static_cast<std::size_t>(i)]);
            if (j % 2 == 0)
                s += detail::kBinomial[static_cast<std::size_t>(j)][static_cast<std::size_t>(j / 2)] *
                     (a.c_[static_cast<std::size_t>(j / 2)] * b.c_[static_cast<std::size_t>(j / 2)]);
            r.c_[static_cast<std::size_t>(j)] = s;
        }
        return r;
    }

    // Solves r*b = a coefficient by coefficient.
    friend Jet operator/(const Jet& a, const Jet& b) {
        require_compatible(a, b);
        if (std::abs(b.c_[0]) < kDivisionFloor)
            throw DivisionByZeroJet("jet division by value " + std::to_string(b.c_[0]));
        Jet r;
        r.base_ = a.base_;
        r.order_ = a.order_;
        for (int j = 0; j <= a.order_; ++j) {
            double s = a.c_[static_cast<std::size_t>(j)];
            for (int i = 0; i < j; ++i)
                s -= detail::kBinomial[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                     r.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j - i)];
            r.c_[static_cast<std::size_t>(j)] = s / b.c_[0];
        }
        return r;
    }

    // double acts as a constant; no base point to clash with.
    friend Jet operator*(double s, const Jet& a) {
        Jet r = a;
        for (int j = 0; j <= a.order_; ++j) r.c_[static_cast<std::size_t>(j)] *= s;
        return r;
    }
    friend Jet operator*(const Jet& a, double s) { return s * a; }
    friend Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
    friend Jet operator+(const Jet& a, double s) {
        Jet r = a;
        r.c_[0] += s;
        return r;
    }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

    Jet& operator+=(const Jet& b) { return *this = *this + b; }
    Jet& operator-=(const Jet& b) { return *this = *this - b; }
    Jet& operator*=(const Jet& b) { return *this = *this * b; }

    friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
        os << "[";
        for (int i = 0; i <= j.order_; ++i) os << (i ? ", " : "") << j.c_[static_cast<std::size_t>(i)];
        return os << "]@" << j.base_;
    }

private:
    static constexpr double kDivisionFloor = 1e-290;

    static void check_order(int order) {
        if (order < 0 || order > kMaxJetOrder)
            throw OrderExhausted("jet order " + std::to_string(order) +
                                 " outside [0, " + std::to_string(kMaxJetOrder) + "]");
    }

    static void require_compatible(const Jet& a, const Jet& b) {
        if (a.base_ != b.base_)
            throw JetMismatch("jets at different base points combined");
        if (a.order_ != b.order_)
            throw JetMismatch("jets of different orders combined: " +
                              std::to_string(a.order_) + " vs " + std::to_string(b.order_));
    }

    double base_ = 0.0;
    int order_ = 0;
    std::array<double, kMaxJetOrder + 1> c_{};

    friend Jet shift(const Jet&);
    friend Jet sqrt(const Jet&);
    friend Jet pow(const Jet&, double);
};

/// The derivative map phi -> phi'; coefficients shift down, order drops by one.
inline Jet shift(const Jet& a) {
    if (a.order_ < 1)
        throw OrderExhausted("shift of an order-0 jet");
    Jet r;
    r.base_ = a.base_;
    r.order_ = a.order_ - 1;
    for (int j = 0; j < a.order_; ++j) r.c_[static_cast<std::size_t>(j)] = a.c_[static_cast<std::size_t>(j + 1)];
    return r;
}

/// Square root via the triangular recurrence from s*s = a.
inline Jet sqrt(const Jet& a) {
    if (!(a.c_[0] > 0.0))
        throw NonPositiveBase("jet sqrt of non-positive value " + std::to_string(a.c_[0]));
    Jet r;
    r.base_ = a.base_;
    r.order_ = a.order_;
    r.c_[0] = std::sqrt(a.c_[0]);
    for (int j = 1; j <= a.order_; ++j) {
        double s = a.c_[static_cast<std::size_t>(j)];
        for (int i = 1; i < j; ++i)
            s -= detail::kBinomial[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                 r.c_[static_cast<std::size_t>(i)] * r.c_[static_cast<std::size_t>(j - i)];
        r.c_[static_cast<std::size_t>(j)] = s / (2.0 * r.c_[0]);
    }
    return r;
}

/// Real power a^p through the classical power-series recurrence
///   w_j = (1/(j a_0)) sum_{i=1..j} ((p+1) i - j) a_i w_{j-i}
/// applied to Taylor coefficients (derivatives over factorials).
inline Jet pow(const Jet& a, double p) {
    if (!(a.c_[0] > 0.0))
        throw NonPositiveBase("jet pow of non-positive value " + std::to_string(a.c_[0]));
    const int n = a.order_;
    std::array<double, kMaxJetOrder + 1> tay{}, w{};
    for (int i = 0; i <= n; ++i) tay[static_cast<std::size_t>(i)] = a.c_[static_cast<std::size_t>(i)] / detail::kFactorial[static_cast<std::size_t>(i)];
    w[0] = std::pow(tay[0], p);
    for (int j = 1; j <= n; ++j) {
        double s = 0.0;
        for (int i = 1; i <= j; ++i)
            s += ((p + 1.0) * i - j) * tay[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j - i)];
        w[static_cast<std::size_t>(j)] = s / (j * tay[0]);
    }
    Jet r;
    r.base_ = a.base_;
    r.order_ = n;
    for (int j = 0; j <= n; ++j) r.c_[static_cast<std::size_t>(j)] = w[static_cast<std::size_t>(j)] * detail::kFactorial[static_cast<std::size_t>(j)];
    return r;
}

} // namespace curvlab
