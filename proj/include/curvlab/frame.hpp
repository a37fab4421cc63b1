#pragma once

// Moving-frame data: bracket structure functions c_ij^k with
// [e_i, e_j] = sum_k c_ij^k e_k, and the rule for how frame directions act
// on scalar fields. Scalar fields here depend on the single coordinate t
// only, so exactly one frame direction d acts, via e_d(phi) = mu * phi'.

#include <cmath>
#include <utility>

#include "curvlab/tensor.hpp"

namespace curvlab {

struct FrameSpec {
    int dim = 0;
    Tensor brackets;      // rank 3, c[i][j][k]
    int deriv_direction;  // the single index whose scalar action is nonzero
    Jet deriv_factor;     // mu with e_d(phi) = mu * phi'

    /// Frame derivative of a scalar field; the order drops by one.
    Jet derive_scalar(const Jet& phi, int i) const {
        if (i == deriv_direction)
            return deriv_factor.truncated(phi.order() - 1) * shift(phi);
        if (phi.order() < 1)
            throw OrderExhausted("frame derivative of an order-0 scalar");
        return Jet::constant(0.0, phi.base_point(), phi.order() - 1);
    }
};

/// Constant almost complex structure in frame components, J e_i = sum_s J_is e_s.
struct ComplexStructure {
    Tensor jmat;  // rank 2, constant entries

    double entry(int i, int j) const { return jmat.at(i, j).value(); }
};

namespace detail {

inline double bracket_antisymmetry_residual(const Tensor& c) {
    const int d = c.dim();
    double m = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                m = std::max(m, (c.at(i, j, k) + c.at(j, i, k)).max_abs_coeff());
    return m;
}

// [[e_i,e_j],e_k] + cyclic = 0 expands, per output direction l, to
//   sum_cyc(i,j,k) ( sum_a c_ij^a c_ak^l - e_k(c_ij^l) ) = 0.
inline double jacobi_residual(const FrameSpec& f) {
    const int d = f.dim;
    const Tensor& c = f.brackets;
    const int out_order = c.order() - 1;
    double m = 0.0;
    auto one_term = [&](int i, int j, int k, int l) {
        Jet v = -f.derive_scalar(c.at(i, j, l), k);
        for (int a = 0; a < d; ++a)
            v += (c.at(i, j, a) * c.at(a, k, l)).truncated(out_order);
        return v;
    };
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int k = j + 1; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    Jet v = one_term(i, j, k, l) + one_term(j, k, i, l) + one_term(k, i, j, l);
                    m = std::max(m, v.max_abs_coeff());
                }
    return m;
}

} // namespace detail

/// Builds a FrameSpec, by default validating bracket antisymmetry and the
/// Jacobi identity. Validation can be switched off to construct deliberately
/// broken frames for negative controls.
inline FrameSpec make_frame_spec(Tensor brackets, int deriv_direction, Jet deriv_factor,
                                 bool validate = true, double tol = 1e-9) {
    if (brackets.rank() != 3) throw ShapeError("FrameSpec brackets must have rank 3");
    const int d = brackets.dim();
    if (d < 2 || d % 2 != 0) throw InvalidParams("frame dimension must be even and >= 2");
    if (deriv_direction < 0 || deriv_direction >= d)
        throw InvalidParams("deriv_direction outside frame");
    if (deriv_factor.base_point() != brackets.base_point() ||
        deriv_factor.order() != brackets.order())
        throw JetMismatch("deriv_factor must match the brackets' base point and order");

    FrameSpec f{d, std::move(brackets), deriv_direction, std::move(deriv_factor)};
    if (validate) {
        const double scale = std::max(1.0, f.brackets.max_abs_coeff());
        const double anti = detail::bracket_antisymmetry_residual(f.brackets);
        if (anti > tol * scale)
            throw InvalidParams("bracket antisymmetry violated, residual " + std::to_string(anti));
        const double jac = detail::jacobi_residual(f);
        if (jac > tol * std::max(1.0, scale * scale))
            throw InvalidParams("Jacobi identity violated, residual " + std::to_string(jac));
    }
    return f;
}

/// Builds a ComplexStructure from constant entries, checking J^2 = -I and
/// skewness exactly (entries are +-1/0 in every use here).
inline ComplexStructure make_complex_structure(Tensor jmat, double tol = 1e-12) {
    if (jmat.rank() != 2) throw ShapeError("ComplexStructure matrix must have rank 2");
    const int d = jmat.dim();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Jet& e = jmat.at(i, j);
            for (int c = 1; c <= e.order(); ++c)
                if (std::abs(e.coeff(c)) > tol)
                    throw InvalidParams("complex structure entries must be constant");
            if (std::abs(e.value() + jmat.at(j, i).value()) > tol)
                throw InvalidParams("complex structure must be skew");
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = (i == j) ? 1.0 : 0.0;
            for (int a = 0; a < d; ++a) s += jmat.at(i, a).value() * jmat.at(a, j).value();
            if (std::abs(s) > tol) throw InvalidParams("J^2 != -I");
        }
    return ComplexStructure{std::move(jmat)};
}

} // namespace curvlab
