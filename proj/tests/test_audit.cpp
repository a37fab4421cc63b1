#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "curvlab/audit.hpp"
#include "curvlab/example_family.hpp"

using namespace curvlab;

namespace {

const AuditEntry& find_entry(const AuditReport& rep, const std::string& id) {
    for (const auto& e : rep.entries)
        if (e.id == id) return e;
    FAIL("entry not found: " << id);
    static AuditEntry dummy;
    return dummy;
}

// global frame relabeling: vertex permutation applied to every tensor slot
Tensor vertex_relabel(const Tensor& t, const std::vector<int>& perm) {
    Tensor out(t.dim(), t.rank(), t.base_point(), t.order());
    std::array<int, kMaxRank> idx{}, src{};
    for (std::size_t f = 0; f < t.size(); ++f) {
        std::size_t rem = f;
        for (int s = t.rank() - 1; s >= 0; --s) {
            idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % t.dim());
            rem /= static_cast<std::size_t>(t.dim());
        }
        for (int s = 0; s < t.rank(); ++s)
            src[static_cast<std::size_t>(s)] = perm[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        std::size_t g = 0;
        for (int s = 0; s < t.rank(); ++s) g = g * t.dim() + static_cast<std::size_t>(src[static_cast<std::size_t>(s)]);
        out.flat(f) = t.flat(g);
    }
    return out;
}

} // namespace

TEST_CASE("the catalog is complete and ordered") {
    const std::vector<std::string> want = {
        "eq03_curvature_j_invariant",    "eq04_ricci_j_invariant",
        "eq05_j_trace_is_ricci",         "eq06_j_pair_trace_is_ricci",
        "eq07_ricci_form_closed",        "eq08_laplacian_ricci_norm_split",
        "eq09_nabla_ricci_j_cycle",      "eq10_rough_laplacian_transfer",
        "eq11_model_action_on_ricci",    "eq12_ricci_commutation_ricci",
        "eq13_contracted_commutation_f", "eq14_reduced_commutation_f",
        "eq15_transfer_with_f",          "eq16_laplacian_ricci_norm_f",
        "eq17_lichnerowicz",             "eq18_ricci_commutation_riemann",
        "eq19_j_curvature_traces",       "eq20_bianchi_transvections",
        "eq21_projective_contraction_f", "eq22a_projective_norm_via_riemann",
        "eq22b_projective_norm_split",   "eq23_contracted_f_projective",
        "eq24_laplacian_riemann_norm_f",
    };
    REQUIRE(audit_catalog_ids() == want);
}

TEST_CASE("every catalog identity appears exactly once in a report") {
    FamilyParams p{1, PowerH{-2.0}, 1.3, 5};
    const AuditReport rep = run_full_audit(build_family_package(p));
    std::multiset<std::string> seen;
    for (const auto& e : rep.entries) seen.insert(e.id);
    for (const auto& id : audit_catalog_ids()) REQUIRE(seen.count(id) == 1);
    REQUIRE(rep.entries.size() == audit_catalog_ids().size());
}

TEST_CASE("full audit passes on a constant-r non-Einstein point") {
    // case (i): r = 0 constant, not Einstein; everything except eq24 runs
    FamilyParams p = case_presets(CaseId::i, 1, 1.0);
    const AuditReport rep = run_full_audit(build_family_package(p));
    for (const auto& e : rep.entries) {
        if (e.id == "eq24_laplacian_riemann_norm_f") {
            REQUIRE(e.verdict == AuditVerdict::skipped);
        } else {
            INFO(e.id << " residual " << e.residual);
            REQUIRE(e.verdict == AuditVerdict::pass);
        }
    }
    REQUIRE(rep.classification == "pseudosymmetric_with_f");
    REQUIRE_THAT(rep.f_hat, Catch::Matchers::WithinRel(1.0, 1e-9));
}

TEST_CASE("full audit passes on an Einstein point, eq24 included") {
    FamilyParams p = case_presets(CaseId::iii, 2, 0.6);
    const AuditReport rep = run_full_audit(build_family_package(p));
    for (const auto& e : rep.entries) {
        INFO(e.id << " residual " << e.residual << " note " << e.note);
        REQUIRE(e.verdict == AuditVerdict::pass);
    }
}

TEST_CASE("constant-r identities are skipped when r varies") {
    FamilyParams p{2, PowerH{-2.0}, 1.3, 5};  // r proportional to t^-4
    const AuditReport rep = run_full_audit(build_family_package(p));
    for (const char* id : {"eq13_contracted_commutation_f", "eq14_reduced_commutation_f",
                           "eq15_transfer_with_f", "eq16_laplacian_ricci_norm_f",
                           "eq24_laplacian_riemann_norm_f"}) {
        const AuditEntry& e = find_entry(rep, id);
        REQUIRE(e.verdict == AuditVerdict::skipped);
        REQUIRE_FALSE(e.note.empty());
    }
    // the ungated ones still pass
    REQUIRE(find_entry(rep, "eq17_lichnerowicz").verdict == AuditVerdict::pass);
    REQUIRE(find_entry(rep, "eq12_ricci_commutation_ricci").verdict == AuditVerdict::pass);
}

TEST_CASE("frozen anchors of the Laplacian split at the reference point") {
    // case (i), m=1, t=1: lap(|S|^2) = 1024 and |nabla S|^2 = 384, so the
    // split reads 1024 = 2*(4*2*16) /... = 8n f |S|^2 + 2|nabla S|^2 = 256 + 768
    FamilyParams p = case_presets(CaseId::i, 1, 1.0);
    KaehlerPackage pkg = build_family_package(p);
    const Jet s2 = pkg.ricci.frobenius_sq();
    REQUIRE_THAT(s2.value(), Catch::Matchers::WithinRel(16.0, 1e-12));
    REQUIRE_THAT(laplacian(s2, pkg).value(), Catch::Matchers::WithinRel(1024.0, 1e-10));
    const Tensor nS = covariant_derivative(pkg.ricci, pkg);
    REQUIRE_THAT(nS.frobenius_sq().value(), Catch::Matchers::WithinRel(384.0, 1e-10));
}

TEST_CASE("a non-compatible complex structure fails the audit") {
    // valid almost complex structure, but not the one the metric is Kaehler
    // for: swap the pairing to (0,p)(m,q)
    FamilyParams p{1, PowerH{-2.0}, 1.2, 5};
    auto [frame, cs_good] = build_family(p);
    Tensor jm(4, 2, p.t0, frame.brackets.order());
    auto setj = [&](int i, int j) {
        jm.at(i, j) = Jet::constant(1.0, p.t0, frame.brackets.order());
        jm.at(j, i) = Jet::constant(-1.0, p.t0, frame.brackets.order());
    };
    setj(0, 2);
    setj(1, 3);
    ComplexStructure cs_bad = make_complex_structure(std::move(jm));
    KaehlerPackage pkg = build_package(frame, cs_bad);
    const auto entries = audit_kaehler_identities(pkg);
    bool any_fail = false;
    for (const auto& e : entries) any_fail = any_fail || e.verdict == AuditVerdict::fail;
    REQUIRE(any_fail);
}

TEST_CASE("audit residuals are invariant under frame relabeling") {
    const int m = 2;
    FamilyParams p{m, SqrtFamilyH{0.0, 1.0, 0.0}, 1.1, 5};
    auto [frame, cs] = build_family(p);
    const AuditReport base = run_full_audit(build_package(frame, cs));

    // swap the two base directions together with their J-images
    std::vector<int> perm = {1, 0, 3, 2, 4, 5};
    Tensor c2 = vertex_relabel(frame.brackets, perm);
    Tensor j2 = vertex_relabel(cs.jmat, perm);
    FrameSpec frame2 = make_frame_spec(std::move(c2), frame.deriv_direction, frame.deriv_factor);
    const AuditReport relabeled =
        run_full_audit(build_package(std::move(frame2), make_complex_structure(std::move(j2))));

    REQUIRE(base.entries.size() == relabeled.entries.size());
    for (std::size_t i = 0; i < base.entries.size(); ++i) {
        REQUIRE(base.entries[i].id == relabeled.entries[i].id);
        REQUIRE(base.entries[i].verdict == relabeled.entries[i].verdict);
        if (base.entries[i].verdict != AuditVerdict::skipped)
            REQUIRE_THAT(relabeled.entries[i].residual,
                         Catch::Matchers::WithinAbs(base.entries[i].residual,
                                                    1e-12 * std::max(1.0, base.entries[i].residual)));
    }
}

TEST_CASE("ricci machinery rejects an exhausted jet budget") {
    FamilyParams p{1, PowerH{-2.0}, 1.0, 2};  // brackets order 2, S order 1
    KaehlerPackage pkg = build_family_package(p);
    const GateStatus gates{};
    REQUIRE_THROWS_AS(audit_ricci_machinery(pkg, Jet::constant(0.0, 1.0, 1), gates),
                      OrderExhausted);
    REQUIRE_THROWS_AS(audit_riemann_machinery(pkg, Jet::constant(0.0, 1.0, 1), gates),
                      OrderExhausted);
}

TEST_CASE("gate detection") {
    // sqrt subfamily: constant r
    FamilyParams pc{2, SqrtFamilyH{1.0, 0.5, -0.2}, 0.8, 5};
    KaehlerPackage pkg = build_family_package(pc);
    GateStatus g = compute_gates(pkg, covariant_derivative(pkg.ricci, pkg));
    REQUIRE(g.constant_r);

    // Einstein detection on case (iii)
    FamilyParams pe = case_presets(CaseId::iii, 1, 0.7);
    KaehlerPackage pkg_e = build_family_package(pe);
    g = compute_gates(pkg_e, covariant_derivative(pkg_e.ricci, pkg_e));
    REQUIRE(g.constant_r);
    REQUIRE(g.einstein);
    REQUIRE(g.ricci_parallel);

    // generic power profile: r varies
    FamilyParams pv{2, PowerH{-2.0}, 1.4, 5};
    KaehlerPackage pkg_v = build_family_package(pv);
    g = compute_gates(pkg_v, covariant_derivative(pkg_v.ricci, pkg_v));
    REQUIRE_FALSE(g.constant_r);
    REQUIRE_FALSE(g.einstein);
}
