#include <catch2/catch_amalgamated.hpp>

#include "curvlab/example_family.hpp"
#include "curvlab/kaehler.hpp"

using namespace curvlab;

namespace {

FrameSpec flat_frame(int dim, double t0, int order) {
    Tensor c(dim, 3, t0, order);
    return make_frame_spec(std::move(c), dim - 1, Jet::constant(0.0, t0, order));
}

ComplexStructure block_j(int m, double t0, int order) {
    Tensor jm(2 * m + 2, 2, t0, order);
    for (int a = 0; a < m; ++a) {
        jm.at(a, a + m) = Jet::constant(1.0, t0, order);
        jm.at(a + m, a) = Jet::constant(-1.0, t0, order);
    }
    jm.at(2 * m, 2 * m + 1) = Jet::constant(1.0, t0, order);
    jm.at(2 * m + 1, 2 * m) = Jet::constant(-1.0, t0, order);
    return make_complex_structure(std::move(jm));
}

} // namespace

TEST_CASE("koszul connection matches the closed-form table") {
    for (int m : {1, 2}) {
        FamilyParams p{m, PowerH{-2.0}, 1.2, 5};
        auto [frame, cs] = build_family(p);
        const Tensor g = koszul_connection(frame);
        const Tensor want = FamilyOracle(p).connection();
        REQUIRE(max_abs_diff_value(g, want) < 1e-12 * std::max(1.0, want.max_abs_value()));

        // nabla_{e_p} e_p = -(2h + t h') e_q
        const Jet h = family_h(p, 6);
        const double expect = -(2.0 * h.value() + p.t0 * h.coeff(1));
        REQUIRE_THAT(g.at(2 * m, 2 * m, 2 * m + 1).value(),
                     Catch::Matchers::WithinRel(expect, 1e-13));
        // nabla_{e_a} e_b = -h delta_ab e_q
        REQUIRE_THAT(g.at(0, 0, 2 * m + 1).value(),
                     Catch::Matchers::WithinRel(-h.value(), 1e-13));
        if (m > 1) REQUIRE(g.at(0, 1, 2 * m + 1).value() == 0.0);
    }
}

TEST_CASE("connection coefficients are skew in the last two slots") {
    FamilyParams p{2, SqrtFamilyH{1.0, 0.0, -1.0}, 0.6, 5};
    auto [frame, cs] = build_family(p);
    const Tensor g = koszul_connection(frame);
    for (int i = 0; i < frame.dim; ++i)
        for (int j = 0; j < frame.dim; ++j)
            for (int k = 0; k < frame.dim; ++k)
                REQUIRE((g.at(i, j, k) + g.at(i, k, j)).max_abs_coeff() == 0.0);
}

TEST_CASE("flat frame: zero connection and curvature") {
    const FrameSpec f = flat_frame(4, 1.0, 3);
    const Tensor g = koszul_connection(f);
    REQUIRE(g.max_abs_coeff() == 0.0);
    const Tensor r = curvature(f, g);
    REQUIRE(r.max_abs_coeff() == 0.0);
}

TEST_CASE("curvature matches the closed-form table") {
    for (int m : {1, 2}) {
        for (double t0 : {0.8, 1.3}) {
            FamilyParams p{m, PowerH{-2.0}, t0, 5};
            KaehlerPackage pkg = build_family_package(p);
            const Tensor want = FamilyOracle(p).riemann();
            const double scale = std::max(1.0, want.max_abs_value());
            REQUIRE(max_abs_diff_value(pkg.riemann, want) < 1e-9 * scale);
        }
    }
}

TEST_CASE("curvature special values") {
    // at m=1, h=t^-2, t=1: R_pqpq = 4 - 14 + 10 = 0
    FamilyParams p{1, PowerH{-2.0}, 1.0, 5};
    KaehlerPackage pkg = build_family_package(p);
    REQUIRE_THAT(pkg.riemann.at(2, 3, 2, 3).value(), Catch::Matchers::WithinAbs(0.0, 1e-12));

    // R_{a b' c d'} = h^2 (d_ac d_bd + d_bc d_ad + 2 d_ab d_cd); a=b=c=d gives 4h^2
    FamilyParams p2{2, PowerH{-1.0}, 1.5, 5};
    KaehlerPackage pkg2 = build_family_package(p2);
    const double h = std::pow(1.5, -1.0);
    REQUIRE_THAT(pkg2.riemann.at(0, 2, 0, 2).value(),
                 Catch::Matchers::WithinRel(4.0 * h * h, 1e-12));
    REQUIRE_THAT(pkg2.riemann.at(0, 3, 0, 3).value(),
                 Catch::Matchers::WithinRel(h * h, 1e-12));
}

TEST_CASE("curvature symmetries and first Bianchi identity") {
    for (int m : {1, 2, 3}) {
        FamilyParams p{m, SqrtFamilyH{0.0, 1.0, 0.0}, 0.9, 5};
        KaehlerPackage pkg = build_family_package(p);
        const auto sym = curvature_symmetry_residuals(pkg.riemann);
        const double scale = std::max(1.0, pkg.riemann.max_abs_coeff());
        REQUIRE(sym.skew_first_pair < 1e-9 * scale);
        REQUIRE(sym.skew_last_pair < 1e-9 * scale);
        REQUIRE(sym.pair_symmetry < 1e-9 * scale);
        REQUIRE(sym.first_bianchi < 1e-9 * scale);
    }
}

TEST_CASE("ricci and scalar curvature match the closed forms") {
    for (int m : {1, 2}) {
        FamilyParams p{m, PowerH{-2.0}, 1.1, 5};
        KaehlerPackage pkg = build_family_package(p);
        FamilyOracle oracle(p);
        const double scale = std::max(1.0, pkg.riemann.max_abs_value());
        REQUIRE(max_abs_diff_value(pkg.ricci, oracle.ricci()) < 1e-9 * scale);
        REQUIRE(std::abs(pkg.scalar.value() - oracle.scalar().value()) < 1e-9 * scale);
    }
    // r = -24 + 44 - 20 = 0 at m=1, h=t^-2, t=1
    FamilyParams p{1, PowerH{-2.0}, 1.0, 5};
    REQUIRE_THAT(build_family_package(p).scalar.value(),
                 Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("second Bianchi trace: div S = grad r / 2") {
    FamilyParams p{2, PowerH{-2.0}, 1.3, 5};
    KaehlerPackage pkg = build_family_package(p);
    const Tensor nS = covariant_derivative(pkg.ricci, pkg);
    const Tensor divS = nS.contract(0, 2);
    const Tensor grad_r = covariant_derivative(pkg.scalar, pkg);
    const double scale = std::max(1.0, nS.max_abs_value());
    for (int k = 0; k < pkg.dim(); ++k)
        REQUIRE(std::abs(divS.at(k).value() - 0.5 * grad_r.at(k).value()) < 1e-10 * scale);
}

TEST_CASE("covariant derivative kills the metric and J") {
    FamilyParams p{1, SqrtFamilyH{1.0, 0.0, -1.0}, 0.5, 5};
    KaehlerPackage pkg = build_family_package(p);
    const int d = pkg.dim();
    const int ord = pkg.gamma.order();

    Tensor delta(d, 2, p.t0, ord);
    for (int i = 0; i < d; ++i) delta.at(i, i) = Jet::constant(1.0, p.t0, ord);
    REQUIRE(covariant_derivative(delta, pkg).max_abs_coeff() < 1e-12);

    Tensor jt(d, 2, p.t0, ord);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            jt.at(i, j) = Jet::constant(pkg.structure.entry(i, j), p.t0, ord);
    const double scale = std::max(1.0, pkg.gamma.max_abs_coeff());
    REQUIRE(covariant_derivative(jt, pkg).max_abs_coeff() < 1e-12 * scale);
}

TEST_CASE("ricci tensor of the flat profile is parallel") {
    // h = t^-(2+m) gives S identically zero, hence nabla S = 0
    FamilyParams p{1, SqrtFamilyH{1.0, 0.0, 0.0}, 1.4, 5};
    KaehlerPackage pkg = build_family_package(p);
    const double scale = std::max(1.0, pkg.riemann.max_abs_value());
    REQUIRE(pkg.ricci.max_abs_value() < 1e-12 * scale);
    REQUIRE(covariant_derivative(pkg.ricci, pkg).max_abs_value() < 1e-10 * scale);
}

TEST_CASE("gradient of a scalar lives in the derivative direction only") {
    FamilyParams p{1, PowerH{-2.0}, 1.2, 5};
    KaehlerPackage pkg = build_family_package(p);
    const Jet t = Jet::coordinate(p.t0, pkg.gamma.order());
    const Tensor grad = covariant_derivative(t * t, pkg);
    for (int i = 0; i < pkg.dim(); ++i) {
        if (i == pkg.frame.deriv_direction)
            REQUIRE(grad.at(i).value() != 0.0);
        else
            REQUIRE(grad.at(i).max_abs_coeff() == 0.0);
    }
}

TEST_CASE("jet order budget is enforced") {
    const FrameSpec f = flat_frame(4, 1.0, 1);
    const Tensor g = koszul_connection(f);
    const Tensor r = curvature(f, g);  // order 0 output
    ComplexStructure cs = block_j(1, 1.0, 1);
    KaehlerPackage pkg{f, cs, g, r, ricci(r), scalar_curvature(ricci(r))};
    REQUIRE_THROWS_AS(covariant_derivative(pkg.riemann, pkg), OrderExhausted);

    Tensor c0(4, 3, 1.0, 0);
    FrameSpec f0{4, std::move(c0), 3, Jet::constant(0.0, 1.0, 0)};
    REQUIRE_THROWS_AS(curvature(f0, koszul_connection(f0)), OrderExhausted);
}

TEST_CASE("kaehler certificates pass on the family") {
    for (int m : {1, 3}) {
        FamilyParams p{m, SqrtFamilyH{0.0, 1.0, 0.0}, 1.6, 5};
        KaehlerPackage pkg = build_family_package(p);
        const CertificateReport cert = kaehler_certificates(pkg.frame, pkg.structure, pkg);
        REQUIRE(cert.pass(1e-9));
    }
}

TEST_CASE("kaehler certificates are exactly zero on the flat frame") {
    const FrameSpec f = flat_frame(4, 1.0, 3);
    ComplexStructure cs = block_j(1, 1.0, 3);
    KaehlerPackage pkg = build_package(f, cs);
    const CertificateReport cert = kaehler_certificates(f, cs, pkg);
    REQUIRE(cert.nijenhuis_residual == 0.0);
    REQUIRE(cert.nabla_j_residual == 0.0);
    REQUIRE(cert.d_omega_residual == 0.0);
}

TEST_CASE("perturbed bracket is caught by the certificates") {
    const int m = 1;
    FamilyParams p{m, PowerH{-2.0}, 1.2, 5};
    auto [frame, cs] = build_family(p);
    const double eps = 1e-3;

    // tamper with c_{0,m}^{p}: the closing of the fundamental form and the
    // parallelism of J both see it
    Tensor c = frame.brackets;
    c.at(0, m, 2 * m) += Jet::constant(eps, p.t0, c.order());
    c.at(m, 0, 2 * m) += Jet::constant(-eps, p.t0, c.order());
    FrameSpec bad = make_frame_spec(std::move(c), frame.deriv_direction, frame.deriv_factor,
                                    /*validate=*/false);
    KaehlerPackage pkg = build_package(bad, cs);
    const CertificateReport cert = kaehler_certificates(bad, cs, pkg);
    REQUIRE_FALSE(cert.pass(1e-9));
    REQUIRE(cert.d_omega_residual >= 0.25 * eps);
    REQUIRE(cert.nabla_j_residual >= 0.25 * eps);
}

TEST_CASE("frame validation rejects broken input") {
    // non-antisymmetric brackets
    Tensor c(4, 3, 1.0, 3);
    c.at(0, 1, 2) = Jet::constant(1.0, 1.0, 3);
    REQUIRE_THROWS_AS(make_frame_spec(std::move(c), 3, Jet::constant(0.0, 1.0, 3)),
                      InvalidParams);

    // Jacobi violation: [e0,e1]=e2, [e0,e2]=[e1,e2]=0 is fine (Heisenberg),
    // but [e0,e1]=e1 plus [e0,e2]=e2, [e1,e2]=e0 is not
    Tensor c2(4, 3, 1.0, 3);
    auto setc = [&](int i, int j, int k, double v) {
        c2.at(i, j, k) += Jet::constant(v, 1.0, 3);
        c2.at(j, i, k) += Jet::constant(-v, 1.0, 3);
    };
    setc(0, 1, 1, 1.0);
    setc(0, 2, 2, 1.0);
    setc(1, 2, 0, 1.0);
    REQUIRE_THROWS_AS(make_frame_spec(std::move(c2), 3, Jet::constant(0.0, 1.0, 3)),
                      InvalidParams);
}
