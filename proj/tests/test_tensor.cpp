#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "curvlab/example_family.hpp"
#include "curvlab/tensor.hpp"

using namespace curvlab;

namespace {

Tensor identity_tensor(int dim, double t0, int order) {
    Tensor d(dim, 2, t0, order);
    for (int i = 0; i < dim; ++i) d.at(i, i) = Jet::constant(1.0, t0, order);
    return d;
}

Tensor family_j(int m, double t0, int order) {
    Tensor j(2 * m + 2, 2, t0, order);
    for (int a = 0; a < m; ++a) {
        j.at(a, a + m) = Jet::constant(1.0, t0, order);
        j.at(a + m, a) = Jet::constant(-1.0, t0, order);
    }
    j.at(2 * m, 2 * m + 1) = Jet::constant(1.0, t0, order);
    j.at(2 * m + 1, 2 * m) = Jet::constant(-1.0, t0, order);
    return j;
}

Tensor random_tensor(std::mt19937& rng, int dim, int rank, double t0, int order) {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    Tensor t(dim, rank, t0, order);
    for (std::size_t i = 0; i < t.size(); ++i) {
        Jet j = Jet::constant(coeff(rng), t0, order);
        const Jet x = Jet::coordinate(t0, order);
        j = j + coeff(rng) * x + coeff(rng) * (x * x);
        t.flat(i) = j;
    }
    return t;
}

} // namespace

TEST_CASE("contract: trace of the identity") {
    const Tensor d = identity_tensor(4, 1.0, 2);
    REQUIRE(d.contract(0, 1).flat(0).value() == 4.0);
}

TEST_CASE("contract: J rows are orthonormal") {
    const Tensor j = family_j(1, 1.0, 2);
    // sum_a J_ia J_ja = delta_ij
    const Tensor jj = outer(j, j).contract(1, 3);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            REQUIRE_THAT(jj.at(i, k).value(),
                         Catch::Matchers::WithinAbs(i == k ? 1.0 : 0.0, 1e-15));
}

TEST_CASE("contract is slot-order independent") {
    std::mt19937 rng(11);
    const Tensor t = random_tensor(rng, 4, 4, 1.0, 3);
    const Tensor a = t.contract(1, 3), b = t.contract(3, 1);
    REQUIRE(max_abs_diff_value(a, b) == 0.0);
}

TEST_CASE("permute basics") {
    std::mt19937 rng(5);
    Tensor s(4, 2, 1.0, 2);
    const Tensor r = random_tensor(rng, 4, 2, 1.0, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s.at(i, j) = r.at(i, j) + r.at(j, i);
    REQUIRE(max_abs_diff_value(s.permuted({1, 0}), s) == 0.0);

    const Tensor j = family_j(1, 1.0, 2);
    const Tensor mj = linear_combine(-1.0, j, 0.0, j);
    REQUIRE(max_abs_diff_value(j.permuted({1, 0}), mj) == 0.0);

    // curvature tensors are skew in the first slot pair
    FamilyParams p{1, PowerH{-2.0}, 1.3, 5};
    const Tensor riem = FamilyOracle(p).riemann();
    const Tensor neg = linear_combine(-1.0, riem, 0.0, riem);
    REQUIRE(max_abs_diff_value(riem.permuted({1, 0, 2, 3}), neg) < 1e-14);

    REQUIRE_THROWS_AS(j.permuted({0, 0}), ShapeError);
}

TEST_CASE("frobenius_sq") {
    REQUIRE(identity_tensor(4, 1.0, 2).frobenius_sq().value() == 4.0);
    REQUIRE(family_j(1, 1.0, 2).frobenius_sq().value() == 4.0);

    // Ricci tensor of the built-in family at m=1, h=t^-2, t=1: diag(-2,-2,2,2)
    FamilyParams p{1, PowerH{-2.0}, 1.0, 5};
    REQUIRE_THAT(FamilyOracle(p).ricci().frobenius_sq().value(),
                 Catch::Matchers::WithinRel(16.0, 1e-12));
}

TEST_CASE("frobenius_sq is permutation invariant and nonnegative") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> iv(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        // integer entries keep the permuted sum bit-exact
        Tensor t(3, 3, 1.0, 3);
        for (std::size_t i = 0; i < t.size(); ++i)
            t.flat(i) = Jet::constant(iv(rng), 1.0, 3) +
                        static_cast<double>(iv(rng)) * Jet::coordinate(1.0, 3);
        const Jet f = t.frobenius_sq();
        REQUIRE(f.value() >= 0.0);
        for (auto perm : {std::initializer_list<int>{2, 0, 1}, {1, 0, 2}, {2, 1, 0}})
            REQUIRE(t.permuted(perm).frobenius_sq().value() == f.value());

        // float entries stay within accumulation roundoff
        const Tensor r = random_tensor(rng, 3, 3, 1.0, 3);
        const double fr = r.frobenius_sq().value();
        REQUIRE_THAT(r.permuted({1, 2, 0}).frobenius_sq().value(),
                     Catch::Matchers::WithinRel(fr, 1e-14));
    }
}

TEST_CASE("linear_combine") {
    std::mt19937 rng(23);
    const Tensor t = random_tensor(rng, 4, 2, 1.0, 3);
    const Tensor u = random_tensor(rng, 4, 2, 1.0, 3);

    const Tensor zero = linear_combine(1.0, t, -1.0, t);
    REQUIRE(zero.max_abs_value() == 0.0);

    const Tensor just_u = linear_combine(0.0, t, 1.0, u);
    REQUIRE(max_abs_diff_value(just_u, u) == 0.0);

    const Tensor small = random_tensor(rng, 4, 2, 1.0, 2);
    REQUIRE_THROWS_AS(linear_combine(1.0, t, 1.0, small), JetMismatch);
    const Tensor odd = random_tensor(rng, 4, 3, 1.0, 3);
    REQUIRE_THROWS_AS(linear_combine(1.0, t, 1.0, odd), ShapeError);
}

TEST_CASE("linear_combine with jet coefficients reproduces the Q table") {
    // Q = R - f R^H at m=1, h=t^-2
    FamilyParams p{1, PowerH{-2.0}, 1.4, 5};
    FamilyOracle oracle(p);
    const Tensor r = oracle.riemann();
    const Jet f = oracle.f();

    Tensor j4(4, 2, p.t0, r.order());
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            j4.at(i, k) = Jet::constant(family_j(1, p.t0, r.order()).at(i, k).value(), p.t0,
                                        r.order());
    Tensor rh(4, 4, p.t0, r.order());
    auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int h = 0; h < 4; ++h)
        for (int i = 0; i < 4; ++i)
            for (int jj = 0; jj < 4; ++jj)
                for (int k = 0; k < 4; ++k)
                    rh.at(h, i, jj, k) = Jet::constant(
                        dl(h, k) * dl(i, jj) - dl(h, jj) * dl(i, k) +
                            j4.at(h, k).value() * j4.at(i, jj).value() -
                            j4.at(h, jj).value() * j4.at(i, k).value() -
                            2.0 * j4.at(h, i).value() * j4.at(jj, k).value(),
                        p.t0, r.order());

    const Tensor q = linear_combine(Jet::like(f, 1.0), r, -f, rh);
    REQUIRE(max_abs_diff_value(q, oracle.q()) < 1e-12 * std::max(1.0, q.max_abs_value()));
}

TEST_CASE("shape and slot errors") {
    const Tensor d = identity_tensor(4, 1.0, 2);
    REQUIRE_THROWS_AS(d.contract(0, 0), ShapeError);
    REQUIRE_THROWS_AS(d.contract(0, 5), ShapeError);
    REQUIRE_THROWS_AS(Tensor(4, 7, 1.0, 2), ShapeError);
}
