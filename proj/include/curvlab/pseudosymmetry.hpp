#pragma once

// The constant-holomorphic-curvature model operator R^H, curvature-like
// operators acting as derivations of the tensor algebra, the least-squares
// structure-function estimate, and the holomorphic projective tensor.

#include <string>

#include "curvlab/kaehler.hpp"

namespace curvlab {

/// R^H_hijk = d_hk d_ij - d_hj d_ik + J_hk J_ij - J_hj J_ik - 2 J_hi J_jk,
/// as constant jets at the given base point and order.
inline Tensor build_rh(const ComplexStructure& cs, double t0, int order) {
    const int d = cs.jmat.dim();
    Tensor rh(d, 4, t0, order);
    auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int h = 0; h < d; ++h)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double v = dl(h, k) * dl(i, j) - dl(h, j) * dl(i, k) +
                                     cs.entry(h, k) * cs.entry(i, j) -
                                     cs.entry(h, j) * cs.entry(i, k) -
                                     2.0 * cs.entry(h, i) * cs.entry(j, k);
                    if (v != 0.0) rh.at(h, i, j, k) = Jet::constant(v, t0, order);
                }
    return rh;
}

/// R^H at the jet budget of a computed package (the curvature's order).
inline Tensor build_rh(const KaehlerPackage& pkg) {
    return build_rh(pkg.structure, pkg.riemann.base_point(), pkg.riemann.order());
}

/// A curvature-like operator A (rank 4, skew in its first two slots) acting
/// on a rank-k tensor as a derivation:
///   (A . T)_{p q j1..jk} = - sum_s sum_a A_{p q js a} T_{..a..}
/// The operator pair (p, q) lands in slots 0 and 1 of the result.
inline Tensor derivation_action(const Tensor& A, const Tensor& T) {
    if (A.rank() != 4) throw ShapeError("derivation_action: operator must have rank 4");
    if (T.rank() < 1) throw ShapeError("derivation_action: tensor rank must be >= 1");
    if (T.rank() + 2 > kMaxRank) throw ShapeError("derivation_action: rank cap exceeded");
    if (A.dim() != T.dim()) throw ShapeError("derivation_action: dimension mismatch");

    const int d = T.dim();
    const int order = std::min(A.order(), T.order());
    const Tensor at = A.order() == order ? A : A.truncated(order);
    const Tensor tt = T.order() == order ? T : T.truncated(order);
    const int rank = T.rank();

    Tensor out(d, rank + 2, T.base_point(), order);
    const std::size_t n_in = tt.size();
    std::array<int, kMaxRank> idx{};
    // skew in (p,q): compute p < q, mirror with a sign
    for (int p = 0; p < d; ++p)
        for (int q = p + 1; q < d; ++q) {
            const std::size_t opq = (static_cast<std::size_t>(p) * static_cast<std::size_t>(d) + static_cast<std::size_t>(q)) * n_in;
            const std::size_t oqp = (static_cast<std::size_t>(q) * static_cast<std::size_t>(d) + static_cast<std::size_t>(p)) * n_in;
            for (std::size_t flat = 0; flat < n_in; ++flat) {
                std::size_t rem = flat;
                for (int s = rank - 1; s >= 0; --s) {
                    idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
                    rem /= static_cast<std::size_t>(d);
                }
                Jet v = Jet::constant(0.0, tt.base_point(), order);
                for (int s = 0; s < rank; ++s) {
                    const std::size_t stride = tt.stride(s);
                    const std::size_t base = flat - static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]) * stride;
                    for (int a = 0; a < d; ++a)
                        v -= at.at(p, q, idx[static_cast<std::size_t>(s)], a) * tt.flat(base + static_cast<std::size_t>(a) * stride);
                }
                out.flat(opq + flat) = v;
                out.flat(oqp + flat) = -v;
            }
        }
    return out;
}

enum class Classification { semisymmetric, pseudosymmetric_with_f, not_pseudosymmetric };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::semisymmetric: return "semisymmetric";
        case Classification::pseudosymmetric_with_f: return "pseudosymmetric_with_f";
        case Classification::not_pseudosymmetric: return "not_pseudosymmetric";
    }
    return "unknown";
}

struct PseudosymVerdict {
    Jet f_hat;                     // value part drives the verdict
    double residual_pseudo = 0.0;  // max |RT - f_hat RHT| / scale
    double residual_semi = 0.0;    // max |RT| / scale
    double scale = 1.0;
    Classification classification = Classification::not_pseudosymmetric;
};

/// Least-squares structure function over all components,
///   f_hat = <RT, RHT> / <RHT, RHT>,
/// computed in jet arithmetic so derivative coefficients come along for the
/// ride; verdicts use value parts only.
inline PseudosymVerdict solve_structure_function(const Tensor& RT, const Tensor& RHT, double tol) {
    require_same_shape(RT, RHT, "solve_structure_function");
    PseudosymVerdict v;
    v.scale = std::max({1.0, RT.max_abs_value(), RHT.max_abs_value()});
    v.residual_semi = RT.max_abs_value() / v.scale;

    const Jet num = dot(RT, RHT);
    const Jet den = dot(RHT, RHT);
    const bool degenerate = den.value() < tol * v.scale * v.scale;
    v.f_hat = degenerate ? Jet::constant(0.0, RT.base_point(), RT.order()) : num / den;

    double max_diff = 0.0;
    for (std::size_t i = 0; i < RT.size(); ++i)
        max_diff = std::max(max_diff,
                            std::abs(RT.flat(i).value() - v.f_hat.value() * RHT.flat(i).value()));
    v.residual_pseudo = max_diff / v.scale;

    if (v.residual_semi < tol)
        v.classification = Classification::semisymmetric;
    else if (!degenerate && v.residual_pseudo < tol)
        v.classification = Classification::pseudosymmetric_with_f;
    else
        v.classification = Classification::not_pseudosymmetric;
    return v;
}

/// Holomorphic projective curvature tensor,
///   P_hijk = R_hijk - (1/(2(n+1))) (S_ij d_hk - S_hj d_ik
///            + (JS)_ij J_hk - (JS)_hj J_ik - 2 (JS)_hi J_jk).
inline Tensor projective_tensor(const KaehlerPackage& pkg) {
    const int d = pkg.dim();
    const int n = pkg.n();
    const Tensor& r = pkg.riemann;
    const Tensor& s = pkg.ricci;
    const double coef = 1.0 / (2.0 * (n + 1));

    // (JS)_ij = sum_a J_ia S_aj
    Tensor js(d, 2, s.base_point(), s.order());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet v = Jet::constant(0.0, s.base_point(), s.order());
            for (int a = 0; a < d; ++a) v += pkg.structure.entry(i, a) * s.at(a, j);
            js.at(i, j) = v;
        }

    auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    Tensor p(d, 4, r.base_point(), r.order());
    for (int h = 0; h < d; ++h)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    Jet v = r.at(h, i, j, k);
                    v -= coef * (dl(h, k) * s.at(i, j) - dl(i, k) * s.at(h, j) +
                                 pkg.structure.entry(h, k) * js.at(i, j) -
                                 pkg.structure.entry(i, k) * js.at(h, j) -
                                 2.0 * pkg.structure.entry(j, k) * js.at(h, i));
                    p.at(h, i, j, k) = v;
                }
    return p;
}

/// Q = R - f R^H, the curvature-like tensor whose derivation action on R
/// vanishes exactly when the structure is pseudosymmetric with function f.
inline Tensor build_q(const KaehlerPackage& pkg, const Jet& f) {
    const Tensor rh = build_rh(pkg);
    const Jet ft = f.truncated(pkg.riemann.order());
    const Jet one = Jet::like(ft, 1.0);
    return linear_combine(one, pkg.riemann, -ft, rh);
}

} // namespace curvlab
