#pragma once

// The built-in family of Kaehler frames on dimension 2m+2, parametrized by a
// positive integer m and a scalar profile h(t) that is smooth and nonzero on
// an interval of positive t. Frame indices, zero-based:
//   base directions      0 .. m-1        ("alpha")
//   paired directions    m .. 2m-1       ("alpha' = alpha + m", the J-images)
//   p = 2m, q = 2m+1     (q is the only direction that differentiates scalars)
//
// Non-zero brackets: [e_a, e_a'] = 2h e_p, [e_a, e_q] = h e_a,
// [e_a', e_q] = h e_a', [e_p, e_q] = (2h + t h') e_p.
//
// The module also carries the closed-form tables for the connection,
// curvature, Ricci tensor, scalar curvature, structure function and Q of
// this family, assembled independently of the computing engine so the two
// routes can be compared.

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "curvlab/kaehler.hpp"

namespace curvlab {

struct PowerH {
    double p = -2.0;  // h(t) = t^p
};

struct SqrtFamilyH {
    // h(t) = t^-(2+m) * sqrt(a + b t^2 + c t^(4+2m))
    double a = 0.0, b = 0.0, c = 0.0;
};

struct CustomH {
    // must return a jet based at t0 with exactly the requested order
    std::function<Jet(double t0, int order)> provider;
};

using HSpec = std::variant<PowerH, SqrtFamilyH, CustomH>;

struct FamilyParams {
    int m = 1;
    HSpec h_spec = PowerH{};
    double t0 = 1.0;
    int order = 5;  // jet order of the frame brackets

    int dim() const { return 2 * m + 2; }
};

inline void validate_params(const FamilyParams& p) {
    if (p.m < 1) throw InvalidParams("m must be >= 1");
    if (!(p.t0 > 0.0)) throw InvalidParams("t0 must be positive");
    if (p.order < 2 || p.order + 1 > kMaxJetOrder)
        throw InvalidParams("jet order must lie in [2, " + std::to_string(kMaxJetOrder - 1) + "]");
    if (const auto* s = std::get_if<SqrtFamilyH>(&p.h_spec)) {
        const double radicand =
            s->a + s->b * p.t0 * p.t0 + s->c * std::pow(p.t0, 4.0 + 2.0 * p.m);
        if (!(radicand > 0.0)) throw InvalidParams("sqrt-family radicand not positive at t0");
    }
}

/// The profile h as a jet of the requested order at t0.
inline Jet family_h(const FamilyParams& p, int order) {
    validate_params(p);
    const Jet t = Jet::coordinate(p.t0, order);
    Jet h = t;  // placeholder
    if (const auto* pw = std::get_if<PowerH>(&p.h_spec)) {
        h = pow(t, pw->p);
    } else if (const auto* s = std::get_if<SqrtFamilyH>(&p.h_spec)) {
        Jet v = Jet::constant(s->a, p.t0, order) + s->b * (t * t) +
                s->c * pow(t, 4.0 + 2.0 * p.m);
        h = sqrt(v) / pow(t, 2.0 + p.m);
    } else {
        const auto& c = std::get<CustomH>(p.h_spec);
        h = c.provider(p.t0, order);
        if (h.base_point() != p.t0 || h.order() != order)
            throw InvalidParams("custom h provider returned a mismatched jet");
    }
    if (std::abs(h.value()) < 1e-12)
        throw InvalidParams("h vanishes at t0");
    return h;
}

/// Frame and complex structure of the family. Bracket entries end up with a
/// uniform jet order K = params.order; the profile is evaluated one order
/// deeper because the (p,q) bracket consumes h'.
inline std::pair<FrameSpec, ComplexStructure> build_family(const FamilyParams& p) {
    validate_params(p);
    const int K = p.order;
    const int d = p.dim();
    const int pi = 2 * p.m, qi = 2 * p.m + 1;

    const Jet t_deep = Jet::coordinate(p.t0, K + 1);
    const Jet h_deep = family_h(p, K + 1);
    const Jet h = h_deep.truncated(K);
    const Jet t = t_deep.truncated(K);
    const Jet two_h_th = (2.0 * h) + t * shift(h_deep);

    Tensor c(d, 3, p.t0, K);
    auto setc = [&](int i, int j, int k, const Jet& v) {
        c.at(i, j, k) += v;
        c.at(j, i, k) -= v;
    };
    for (int a = 0; a < p.m; ++a) {
        setc(a, a + p.m, pi, 2.0 * h);
        setc(a, qi, a, h);
        setc(a + p.m, qi, a + p.m, h);
    }
    setc(pi, qi, pi, two_h_th);

    FrameSpec frame = make_frame_spec(std::move(c), qi, t * h);

    Tensor jm(d, 2, p.t0, K);
    auto setj = [&](int i, int j) {
        jm.at(i, j) = Jet::constant(1.0, p.t0, K);
        jm.at(j, i) = Jet::constant(-1.0, p.t0, K);
    };
    for (int a = 0; a < p.m; ++a) setj(a, a + p.m);
    setj(pi, qi);

    return {std::move(frame), make_complex_structure(std::move(jm))};
}

inline KaehlerPackage build_family_package(const FamilyParams& p) {
    auto [frame, cs] = build_family(p);
    return build_package(std::move(frame), std::move(cs));
}

// ---------------------------------------------------------------------------
// Closed-form oracle tables
// ---------------------------------------------------------------------------

namespace detail {

// Writes a curvature-type component together with its eight images under
// first-pair skewness, last-pair skewness and pair symmetry, verifying that
// overlapping assignments agree.
class CurvatureFiller {
public:
    explicit CurvatureFiller(Tensor t) : t_(std::move(t)), set_(t_.size(), 0) {}

    void assign(int h, int i, int j, int k, const Jet& v) {
        put(h, i, j, k, v);
        put(i, h, j, k, -v);
        put(h, i, k, j, -v);
        put(i, h, k, j, v);
        put(j, k, h, i, v);
        put(k, j, h, i, -v);
        put(j, k, i, h, -v);
        put(k, j, i, h, v);
    }

    Tensor take() && { return std::move(t_); }

private:
    void put(int h, int i, int j, int k, const Jet& v) {
        const std::array<int, 4> idx{h, i, j, k};
        const std::size_t f = t_.flat_index(std::span<const int>(idx.data(), idx.size()));
        if (set_[f]) {
            const double diff = (t_.flat(f) - v).max_abs_coeff();
            const double scale = std::max(1.0, v.max_abs_coeff());
            if (diff > 1e-9 * scale)
                throw InvalidParams("oracle table internally inconsistent");
            return;
        }
        t_.flat(f) = v;
        set_[f] = 1;
    }

    Tensor t_;
    std::vector<char> set_;
};

struct FamilyScalars {
    Jet h, hp, hpp, t;  // all at the oracle's target order
    Jet h2;             // h^2
    Jet thh;            // t h h'
    Jet hth;            // h (h + t h')
    Jet t2hp;           // t^2 (h'^2 + h h'')
};

inline FamilyScalars family_scalars(const FamilyParams& p, int target_order) {
    const Jet h_deep = family_h(p, target_order + 2);
    const Jet t_deep = Jet::coordinate(p.t0, target_order + 2);
    FamilyScalars s{
        .h = h_deep.truncated(target_order),
        .hp = shift(h_deep).truncated(target_order),
        .hpp = shift(shift(h_deep)),
        .t = t_deep.truncated(target_order),
        .h2 = Jet::constant(0.0, p.t0, target_order),
        .thh = Jet::constant(0.0, p.t0, target_order),
        .hth = Jet::constant(0.0, p.t0, target_order),
        .t2hp = Jet::constant(0.0, p.t0, target_order),
    };
    s.h2 = s.h * s.h;
    s.thh = s.t * s.h * s.hp;
    s.hth = s.h * (s.h + s.t * s.hp);
    s.t2hp = (s.t * s.t) * (s.hp * s.hp + s.h * s.hpp);
    return s;
}

} // namespace detail

/// Closed-form evaluators for every table of the family, assembled directly
/// from the published component patterns rather than from the engine.
class FamilyOracle {
public:
    explicit FamilyOracle(FamilyParams p) : p_(std::move(p)) { validate_params(p_); }

    const FamilyParams& params() const { return p_; }

    /// Connection coefficients at the brackets' jet order.
    Tensor connection() const {
        const int K = p_.order;
        const auto s = detail::family_scalars(p_, K);
        const int d = p_.dim(), m = p_.m, pi = 2 * m, qi = 2 * m + 1;
        Tensor g(d, 3, p_.t0, K);
        auto anti = [&](int i, int j, int k, const Jet& v) {
            g.at(i, j, k) = v;
            g.at(i, k, j) = -v;
        };
        const Jet two_h_th = 2.0 * s.h + s.t * s.hp;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (a == b) {
                    anti(a, b, qi, -s.h);          // nabla_a e_b = -h d_ab e_q
                    anti(a + m, b + m, qi, -s.h);  // nabla_a' e_b'
                    anti(a, b + m, pi, s.h);       // nabla_a e_b' = h d_ab e_p
                    anti(a + m, b, pi, -s.h);      // nabla_a' e_b
                    anti(pi, a, b + m, -s.h);      // nabla_p e_a = -h e_a'
                }
            }
        anti(pi, pi, qi, -two_h_th);
        return g;
    }

    /// Curvature components at one order below the brackets.
    Tensor riemann() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        const int d = p_.dim(), m = p_.m, pi = 2 * m, qi = 2 * m + 1;
        detail::CurvatureFiller fill(Tensor(d, 4, p_.t0, K));
        auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };

        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int e = 0; e < m; ++e) {
                        const Jet v1 = (dl(a, c) * dl(b, e) - dl(a, e) * dl(b, c)) * s.h2;
                        fill.assign(a, b, c, e, v1);
                        fill.assign(a, b, c + m, e + m, v1);
                        fill.assign(a + m, b + m, c + m, e + m, v1);
                        const Jet v2 =
                            (dl(a, c) * dl(b, e) + dl(b, c) * dl(a, e) + 2.0 * dl(a, b) * dl(c, e)) * s.h2;
                        fill.assign(a, b + m, c, e + m, v2);
                    }
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const Jet v3 = 2.0 * dl(a, b) * s.hth;
                fill.assign(a, b + m, pi, qi, v3);
                const Jet v4 = dl(a, b) * s.hth;
                fill.assign(a, pi, b, pi, v4);
                fill.assign(a, pi, b + m, qi, v4);
                fill.assign(a, qi, b, qi, v4);
                fill.assign(a, qi, b + m, pi, -v4);
                fill.assign(a + m, pi, b + m, pi, v4);
                fill.assign(a + m, qi, b + m, qi, v4);
            }
        fill.assign(pi, qi, pi, qi, 4.0 * s.h2 + 7.0 * s.thh + s.t2hp);
        return std::move(fill).take();
    }

    Tensor ricci() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        const int d = p_.dim(), m = p_.m;
        Tensor out(d, 2, p_.t0, K);
        const Jet diag_base = -2.0 * ((m + 2.0) * s.h2 + s.thh);
        const Jet diag_pq = -2.0 * (m + 2.0) * s.h2 - (2.0 * m + 7.0) * s.thh - s.t2hp;
        for (int a = 0; a < 2 * m; ++a) out.at(a, a) = diag_base;
        out.at(2 * m, 2 * m) = diag_pq;
        out.at(2 * m + 1, 2 * m + 1) = diag_pq;
        return out;
    }

    Jet scalar() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        const double m = p_.m;
        return -4.0 * (m + 1.0) * (m + 2.0) * s.h2 - 2.0 * (4.0 * m + 7.0) * s.thh - 2.0 * s.t2hp;
    }

    /// Structure function f = -h (h + t h').
    Jet f() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        return -s.hth;
    }

    Tensor q() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        const int d = p_.dim(), m = p_.m, pi = 2 * m, qi = 2 * m + 1;
        detail::CurvatureFiller fill(Tensor(d, 4, p_.t0, K));
        auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    for (int e = 0; e < m; ++e) {
                        const Jet v1 = -(dl(a, c) * dl(b, e) - dl(a, e) * dl(b, c)) * s.thh;
                        fill.assign(a, b, c, e, v1);
                        fill.assign(a, b, c + m, e + m, v1);
                        fill.assign(a + m, b + m, c + m, e + m, v1);
                        const Jet v2 =
                            -(dl(a, c) * dl(b, e) + dl(b, c) * dl(a, e) + 2.0 * dl(a, b) * dl(c, e)) * s.thh;
                        fill.assign(a, b + m, c, e + m, v2);
                    }
        fill.assign(pi, qi, pi, qi, 3.0 * s.thh + s.t2hp);
        return std::move(fill).take();
    }

    /// The component (R.R)_{0, p, 0, 1, 1, p} that witnesses R.R != 0.
    /// For m >= 2 it equals t h^2 h' (h + t h'); at m = 1 the slot index 1
    /// coincides with the J-image of direction 0, which quadruples the
    /// component relative to that generic-position form.
    Jet rr_witness() const {
        const int K = p_.order - 1;
        const auto s = detail::family_scalars(p_, K);
        const Jet generic = s.t * s.h2 * s.hp * (s.h + s.t * s.hp);
        return (p_.m == 1 ? 4.0 : 1.0) * generic;
    }

private:
    FamilyParams p_;
};

enum class OracleTable { connection, riemann, ricci, scalar, f, q, rr_witness };

inline std::variant<Tensor, Jet> oracle_eval(const FamilyParams& p, OracleTable which) {
    FamilyOracle o(p);
    switch (which) {
        case OracleTable::connection: return o.connection();
        case OracleTable::riemann: return o.riemann();
        case OracleTable::ricci: return o.ricci();
        case OracleTable::scalar: return o.scalar();
        case OracleTable::f: return o.f();
        case OracleTable::q: return o.q();
        case OracleTable::rr_witness: return o.rr_witness();
    }
    throw InvalidParams("unknown oracle table id");
}

// ---------------------------------------------------------------------------
// The constant-scalar-curvature subfamily and its published cases
// ---------------------------------------------------------------------------

enum class CaseId { i, ii, iii };

/// Scalar curvature of the sqrt subfamily: r = -4 c (m+1)(m+2), constant.
inline double sqrt_family_scalar(double c, int m) {
    return -4.0 * c * (m + 1.0) * (m + 2.0);
}

/// f(t) = (a(m+1) + b m t^2 - c t^(4+2m)) / t^(4+2m) for the sqrt subfamily.
inline double sqrt_family_f(double a, double b, double c, int m, double t) {
    const double tp = std::pow(t, 4.0 + 2.0 * m);
    return (a * (m + 1.0) + b * m * t * t - c * tp) / tp;
}

inline FamilyParams case_presets(CaseId which, int m, double t0, int order = 5) {
    if (m < 1) throw InvalidParams("m must be >= 1");
    FamilyParams p;
    p.m = m;
    p.t0 = t0;
    p.order = order;
    switch (which) {
        case CaseId::i:
            if (!(t0 > 0.0)) throw InvalidParams("case (i) needs t0 > 0");
            p.h_spec = SqrtFamilyH{0.0, 1.0, 0.0};
            break;
        case CaseId::ii:
            if (!(t0 > 0.0)) throw InvalidParams("case (ii) needs t0 > 0");
            p.h_spec = SqrtFamilyH{1.0, 0.0, 0.0};
            break;
        case CaseId::iii:
            if (!(t0 > 0.0 && t0 < 1.0)) throw InvalidParams("case (iii) needs t0 in (0, 1)");
            p.h_spec = SqrtFamilyH{1.0, 0.0, -1.0};
            break;
    }
    validate_params(p);
    return p;
}

/// Published f of the three cases; case (iii) scales with its free a > 0.
inline double case_f_value(CaseId which, int m, double t, double a = 1.0) {
    switch (which) {
        case CaseId::i: return m / std::pow(t, 2.0 * m + 2.0);
        case CaseId::ii: return (m + 1.0) / std::pow(t, 2.0 * m + 4.0);
        case CaseId::iii: return a * (1.0 + (m + 1.0) / std::pow(t, 2.0 * m + 4.0));
    }
    throw InvalidParams("unknown case id");
}

/// Sample grid: bounded-interval profiles (c < 0) stay inside (0, 1);
/// everything else uses a spread of moderate t.
inline std::vector<double> default_t_grid(const HSpec& h) {
    if (const auto* s = std::get_if<SqrtFamilyH>(&h))
        if (s->c < 0.0) return {0.35, 0.6, 0.85};
    return {0.8, 1.0, 1.6, 2.4};
}

} // namespace curvlab
