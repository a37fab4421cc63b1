#pragma once

// Dense component tensors of rank 0..6 over a 2n-dimensional orthonormal
// frame, with Jet entries. The metric is the identity, so contraction is a
// plain index sum and there is no raising or lowering to speak of.

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "curvlab/jet.hpp"

namespace curvlab {

inline constexpr int kMaxRank = 6;

class Tensor {
public:
    /// Zero tensor of the given shape; every component is a zero jet at
    /// (t0, order).
    Tensor(int dim, int rank, double t0, int order)
        : dim_(dim), rank_(rank), base_(t0), order_(order) {
        if (dim < 1) throw ShapeError("tensor dimension must be positive");
        if (rank < 0 || rank > kMaxRank)
            throw ShapeError("tensor rank " + std::to_string(rank) + " outside [0, " +
                             std::to_string(kMaxRank) + "]");
        std::size_t n = 1;
        for (int s = 0; s < rank; ++s) n *= static_cast<std::size_t>(dim);
        comps_.assign(n, Jet::constant(0.0, t0, order));
    }

    /// Rank-0 tensor wrapping one jet. `dim` matters only for the shape
    /// bookkeeping of later covariant derivatives.
    static Tensor scalar(const Jet& v, int dim = 1) {
        Tensor t(dim, 0, v.base_point(), v.order());
        t.comps_[0] = v;
        return t;
    }

    int dim() const { return dim_; }
    int rank() const { return rank_; }
    double base_point() const { return base_; }
    int order() const { return order_; }
    std::size_t size() const { return comps_.size(); }

    const Jet& flat(std::size_t i) const { return comps_[i]; }
    Jet& flat(std::size_t i) { return comps_[i]; }

    std::size_t flat_index(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int s = 0; s < rank_; ++s) f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]);
        return f;
    }

    template <class... I>
    const Jet& at(I... is) const {
        static_assert((std::is_convertible_v<I, int> && ...));
        if (sizeof...(is) != static_cast<std::size_t>(rank_))
            throw ShapeError("index count does not match tensor rank");
        const std::array<int, sizeof...(I)> idx{static_cast<int>(is)...};
        return comps_[flat_index(std::span<const int>(idx.data(), idx.size()))];
    }

    template <class... I>
    Jet& at(I... is) {
        return const_cast<Jet&>(std::as_const(*this).at(is...));
    }

    /// Stride of slot s in the flat layout (row-major, last index contiguous).
    std::size_t stride(int s) const {
        std::size_t r = 1;
        for (int k = s + 1; k < rank_; ++k) r *= static_cast<std::size_t>(dim_);
        return r;
    }

    /// Every component truncated to a lower jet order.
    Tensor truncated(int new_order) const {
        Tensor r(dim_, rank_, base_, new_order);
        for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = comps_[i].truncated(new_order);
        return r;
    }

    /// Sum over two slots set equal; rank drops by two.
    Tensor contract(int slot_a, int slot_b) const {
        if (rank_ < 2 || slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= rank_ || slot_b >= rank_)
            throw ShapeError("contract: bad slots");
        if (slot_a > slot_b) std::swap(slot_a, slot_b);
        Tensor out(dim_, rank_ - 2, base_, order_);
        std::array<int, kMaxRank> idx{};
        const std::size_t n_out = out.size();
        for (std::size_t f = 0; f < n_out; ++f) {
            // decode the output tuple, then weave in the summed slots
            std::size_t rem = f;
            for (int s = rank_ - 3; s >= 0; --s) {
                idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(dim_));
                rem /= static_cast<std::size_t>(dim_);
            }
            std::array<int, kMaxRank> full{};
            Jet sum = Jet::constant(0.0, base_, order_);
            for (int a = 0; a < dim_; ++a) {
                int src = 0;
                for (int s = 0; s < rank_; ++s) {
                    if (s == slot_a || s == slot_b)
                        full[static_cast<std::size_t>(s)] = a;
                    else
                        full[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(src++)];
                }
                sum += comps_[flat_index(std::span<const int>(full.data(), static_cast<std::size_t>(rank_)))];
            }
            out.comps_[f] = sum;
        }
        return out;
    }

    /// Slot permutation: result(j0..jr) = this(j_{perm[0]} .. j_{perm[r]}).
    Tensor permuted(std::span<const int> perm) const {
        if (static_cast<int>(perm.size()) != rank_) throw ShapeError("permute: length != rank");
        std::array<bool, kMaxRank> seen{};
        for (int p : perm) {
            if (p < 0 || p >= rank_ || seen[static_cast<std::size_t>(p)]) throw ShapeError("permute: not a permutation");
            seen[static_cast<std::size_t>(p)] = true;
        }
        Tensor out(dim_, rank_, base_, order_);
        std::array<int, kMaxRank> idx{}, src{};
        for (std::size_t f = 0; f < comps_.size(); ++f) {
            std::size_t rem = f;
            for (int s = rank_ - 1; s >= 0; --s) {
                idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(dim_));
                rem /= static_cast<std::size_t>(dim_);
            }
            for (int s = 0; s < rank_; ++s) src[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
            out.comps_[f] = comps_[flat_index(std::span<const int>(src.data(), static_cast<std::size_t>(rank_)))];
        }
        return out;
    }

    Tensor permuted(std::initializer_list<int> perm) const {
        return permuted(std::span<const int>(perm.begin(), perm.size()));
    }

    /// Sum of squared components; no metric factors in an orthonormal frame.
    Jet frobenius_sq() const {
        Jet sum = Jet::constant(0.0, base_, order_);
        for (const Jet& c : comps_) sum += c * c;
        return sum;
    }

    double max_abs_value() const {
        double m = 0.0;
        for (const Jet& c : comps_) m = std::max(m, std::abs(c.value()));
        return m;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const Jet& c : comps_) m = std::max(m, c.max_abs_coeff());
        return m;
    }

    double max_abs_coeff_through(int upto) const {
        double m = 0.0;
        for (const Jet& c : comps_) m = std::max(m, c.max_abs_coeff_through(upto));
        return m;
    }

private:
    int dim_;
    int rank_;
    double base_;
    int order_;
    std::vector<Jet> comps_;
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.dim() != b.dim() || a.rank() != b.rank())
        throw ShapeError(std::string(what) + ": shape mismatch");
    if (a.base_point() != b.base_point() || a.order() != b.order())
        throw JetMismatch(std::string(what) + ": base point or order mismatch");
}

/// a*T + b*U componentwise, with jet coefficients.
inline Tensor linear_combine(const Jet& a, const Tensor& T, const Jet& b, const Tensor& U) {
    require_same_shape(T, U, "linear_combine");
    Tensor out(T.dim(), T.rank(), T.base_point(), T.order());
    for (std::size_t i = 0; i < T.size(); ++i)
        out.flat(i) = a * T.flat(i) + b * U.flat(i);
    return out;
}

inline Tensor linear_combine(double a, const Tensor& T, double b, const Tensor& U) {
    require_same_shape(T, U, "linear_combine");
    Tensor out(T.dim(), T.rank(), T.base_point(), T.order());
    for (std::size_t i = 0; i < T.size(); ++i)
        out.flat(i) = a * T.flat(i) + b * U.flat(i);
    return out;
}

/// Full componentwise inner product <T, U>.
inline Jet dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    Jet sum = Jet::constant(0.0, a.base_point(), a.order());
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.flat(i) * b.flat(i);
    return sum;
}

/// Outer product; slots of `a` first.
inline Tensor outer(const Tensor& a, const Tensor& b) {
    if (a.dim() != b.dim()) throw ShapeError("outer: dimension mismatch");
    if (a.rank() + b.rank() > kMaxRank) throw ShapeError("outer: rank cap exceeded");
    Tensor out(a.dim(), a.rank() + b.rank(), a.base_point(), a.order());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out.flat(i * b.size() + j) = a.flat(i) * b.flat(j);
    return out;
}

inline Tensor operator*(double s, const Tensor& t) {
    Tensor out(t.dim(), t.rank(), t.base_point(), t.order());
    for (std::size_t i = 0; i < t.size(); ++i) out.flat(i) = s * t.flat(i);
    return out;
}

inline double max_abs_diff_value(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "max_abs_diff_value");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.flat(i).value() - b.flat(i).value()));
    return m;
}

} // namespace curvlab
