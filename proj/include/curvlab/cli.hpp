#pragma once

// Command-line front end. Subcommands:
//   verify          pseudosymmetry checks against the closed forms
//   audit           the full identity catalog
//   scan            one record per grid point: f sign, r constancy, Einstein
//   certify-kaehler the three structure certificates
//
// Exit codes: 0 every check passed, 1 at least one check failed,
// 2 usage or parameter errors. CURVLAB_TOL overrides the default tolerance.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvlab/example_family.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

struct RunConfig {
    std::string command;
    int m = 1;
    std::string h_spec;       // "power:p=-2" or "sqrt:a=1,b=0,c=-1"
    std::string case_id;      // "i", "ii", "iii" (alternative to h_spec)
    std::string t_spec;       // single value or "lo:hi:n"
    int order = 5;
    double tol = 1e-8;
    std::string format = "text";
    std::string out_path;
};

namespace cli_detail {

inline HSpec parse_h_spec(const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        std::stringstream rest(s.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw InvalidParams("bad h spec fragment '" + item + "'");
            try {
                kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw InvalidParams("bad number in h spec fragment '" + item + "'");
            }
        }
    }
    if (kind == "power") {
        if (!kv.count("p")) throw InvalidParams("power spec needs p=<real>");
        return PowerH{kv["p"]};
    }
    if (kind == "sqrt") {
        if (!kv.count("a") || !kv.count("b") || !kv.count("c"))
            throw InvalidParams("sqrt spec needs a=,b=,c=");
        return SqrtFamilyH{kv["a"], kv["b"], kv["c"]};
    }
    throw InvalidParams("unknown h spec kind '" + kind + "' (use power:... or sqrt:...)");
}

inline std::vector<double> parse_t_grid(const std::string& s) {
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) {
        try {
            return {std::stod(s)};
        } catch (const std::exception&) {
            throw InvalidParams("bad t value '" + s + "'");
        }
    }
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InvalidParams("t grid must be lo:hi:n");
    try {
        const double lo = std::stod(s.substr(0, c1));
        const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        const int n = std::stoi(s.substr(c2 + 1));
        if (n < 1) throw InvalidParams("t grid needs n >= 1");
        std::vector<double> out;
        if (n == 1) return {lo};
        for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
        return out;
    } catch (const InvalidParams&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidParams("bad t grid '" + s + "'");
    }
}

inline std::string h_spec_string(const HSpec& h) {
    if (const auto* p = std::get_if<PowerH>(&h)) {
        std::ostringstream os;
        os << "power:p=" << p->p;
        return os.str();
    }
    if (const auto* s = std::get_if<SqrtFamilyH>(&h)) {
        std::ostringstream os;
        os << "sqrt:a=" << s->a << ",b=" << s->b << ",c=" << s->c;
        return os.str();
    }
    return "custom";
}

struct ResolvedConfig {
    HSpec h;
    std::vector<double> grid;
    ordered_json params;
};

inline ResolvedConfig resolve(const RunConfig& cfg) {
    ResolvedConfig rc;
    if (!cfg.case_id.empty() && !cfg.h_spec.empty())
        throw InvalidParams("give either --h or --case, not both");
    if (!cfg.case_id.empty()) {
        CaseId id;
        if (cfg.case_id == "i") id = CaseId::i;
        else if (cfg.case_id == "ii") id = CaseId::ii;
        else if (cfg.case_id == "iii") id = CaseId::iii;
        else throw InvalidParams("case must be i, ii or iii");
        const double probe_t = cfg.t_spec.empty() ? (id == CaseId::iii ? 0.6 : 1.0)
                                                  : parse_t_grid(cfg.t_spec).front();
        rc.h = case_presets(id, cfg.m, probe_t, cfg.order).h_spec;
    } else if (!cfg.h_spec.empty()) {
        rc.h = parse_h_spec(cfg.h_spec);
    } else {
        throw InvalidParams("one of --h or --case is required");
    }
    rc.grid = cfg.t_spec.empty() ? default_t_grid(rc.h) : parse_t_grid(cfg.t_spec);

    // every grid point must be a valid family parameter before compute starts
    for (double t : rc.grid) {
        FamilyParams p{cfg.m, rc.h, t, cfg.order};
        validate_params(p);
    }

    rc.params["command"] = cfg.command;
    rc.params["m"] = cfg.m;
    rc.params["h"] = h_spec_string(rc.h);
    rc.params["order"] = cfg.order;
    rc.params["tol"] = cfg.tol;
    return rc;
}

inline void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
    if (cfg.out_path.empty()) {
        out << body;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw Error("cannot open output path " + cfg.out_path);
    f << body;
}

inline AuditEntry verify_check(const std::string& id, double residual_abs, double scale,
                               double tol) {
    AuditEntry e;
    e.id = id;
    e.scale = std::max(1.0, scale);
    e.residual = residual_abs / e.scale;
    e.threshold = tol;
    e.verdict = e.residual < tol ? AuditVerdict::pass : AuditVerdict::fail;
    return e;
}

/// The verify battery at one grid point.
inline AuditReport run_verify_point(const FamilyParams& p, double tol) {
    AuditReport rep;
    rep.point = p.t0;
    rep.params_desc = "m=" + std::to_string(p.m) + " h=" + h_spec_string(p.h_spec);

    KaehlerPackage pkg = build_family_package(p);
    FamilyOracle oracle(p);
    const Jet f_closed = oracle.f();

    const Tensor rh = build_rh(pkg);
    const Tensor rt = derivation_action(pkg.riemann, pkg.riemann);
    const Tensor rht = derivation_action(rh, pkg.riemann);
    const PseudosymVerdict v = solve_structure_function(rt, rht, tol);
    rep.f_hat = v.f_hat.value();
    rep.r = pkg.scalar.value();
    rep.classification = to_string(v.classification);

    rep.entries.push_back(verify_check("f_hat_matches_closed_form",
                                       std::abs(v.f_hat.value() - f_closed.value()),
                                       std::abs(f_closed.value()), tol));
    rep.entries.push_back(verify_check("pseudosymmetry_residual",
                                       v.residual_pseudo * v.scale, v.scale, tol));

    const Tensor q = build_q(pkg, f_closed);
    const Tensor qr = derivation_action(q, pkg.riemann);
    rep.entries.push_back(verify_check("q_dot_r_vanishes", qr.max_abs_value(), v.scale, tol));

    const int pi = 2 * p.m;
    const double witness = rt.at(0, pi, 0, 1, 1, pi).value();
    const double want = oracle.rr_witness().value();
    rep.entries.push_back(verify_check("witness_matches_closed_form",
                                       std::abs(witness - want), std::abs(want), tol));

    const Tensor rs = derivation_action(pkg.riemann.truncated(pkg.ricci.order()), pkg.ricci);
    const Tensor rhs_t = derivation_action(rh.truncated(pkg.ricci.order()), pkg.ricci);
    const PseudosymVerdict vs = solve_structure_function(rs, rhs_t, tol);
    const bool ricci_flat = vs.classification == Classification::semisymmetric &&
                            v.classification == Classification::semisymmetric;
    rep.entries.push_back(verify_check("ricci_route_same_f",
                                       ricci_flat ? 0.0
                                                  : std::abs(vs.f_hat.value() - v.f_hat.value()),
                                       std::abs(v.f_hat.value()), std::max(tol, 1e-8)));
    return rep;
}

inline ScanRecord run_scan_point(const FamilyParams& p, double tol) {
    ScanRecord rec;
    rec.point = p.t0;
    KaehlerPackage pkg = build_family_package(p);
    const Tensor rh = build_rh(pkg);
    const Tensor rt = derivation_action(pkg.riemann, pkg.riemann);
    const Tensor rht = derivation_action(rh, pkg.riemann);
    const PseudosymVerdict v = solve_structure_function(rt, rht, tol);
    const Tensor nS = covariant_derivative(pkg.ricci, pkg);
    const GateStatus gates = compute_gates(pkg, nS, tol);
    const Tensor nR = covariant_derivative(pkg.riemann, pkg);

    rec.f_hat = v.f_hat.value();
    rec.f_positive = rec.f_hat > 0.0;
    rec.r = pkg.scalar.value();
    rec.r_constant = gates.constant_r;
    rec.einstein = gates.einstein;
    rec.grad_r_norm = std::sqrt(nR.frobenius_sq().value());
    rec.classification = to_string(v.classification);
    return rec;
}

} // namespace cli_detail

/// Programmatic entry point; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    RunConfig cfg;
    if (const char* env = std::getenv("CURVLAB_TOL")) {
        try {
            cfg.tol = std::stod(env);
        } catch (const std::exception&) {
            err << "bad CURVLAB_TOL value '" << env << "'\n";
            return 2;
        }
    }

    CLI::App app{"curvlab - frame-based curvature calculus and identity auditing"};
    app.require_subcommand(1);
    // free the short -h for the profile option below
    app.set_help_flag("--help", "print this help message and exit");

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help message and exit");
        sub->add_option("--m", cfg.m, "number of paired base directions (dim = 2m+2)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--h", cfg.h_spec, "profile spec: power:p=<real> or sqrt:a=,b=,c=");
        sub->add_option("--case", cfg.case_id, "built-in preset: i, ii or iii");
        sub->add_option("--t", cfg.t_spec, "sample point or grid lo:hi:n (inclusive)");
        sub->add_option("--order", cfg.order, "jet order of the frame brackets")
            ->check(CLI::Range(2, kMaxJetOrder - 1));
        sub->add_option("--tol", cfg.tol, "pass/fail tolerance for verify/scan/certify");
        sub->add_option("--format", cfg.format, "output format: text or json")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", cfg.out_path, "write the report to a file instead of stdout");
    };
    add_common(app.add_subcommand("verify", "check the pseudosymmetry relations"));
    add_common(app.add_subcommand("audit", "run the full identity catalog"));
    add_common(app.add_subcommand("scan", "sweep the grid, one record per point"));
    add_common(app.add_subcommand("certify-kaehler", "check N_J, nabla J and d Omega"));

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        const cli_detail::ResolvedConfig rc = cli_detail::resolve(cfg);
        bool all_pass = true;
        std::ostringstream body;

        if (cfg.command == "scan") {
            ordered_json records = ordered_json::array();
            for (double t : rc.grid) {
                FamilyParams p{cfg.m, rc.h, t, cfg.order};
                const ScanRecord rec = cli_detail::run_scan_point(p, cfg.tol);
                if (cfg.format == "json") records.push_back(scan_record_json(rec));
                else render_scan_text(body, rec);
            }
            if (cfg.format == "json") {
                ordered_json j;
                j["params"] = rc.params;
                j["records"] = records;
                body << j.dump(2) << "\n";
            }
        } else {
            ordered_json reports = ordered_json::array();
            for (double t : rc.grid) {
                FamilyParams p{cfg.m, rc.h, t, cfg.order};
                AuditReport rep;
                if (cfg.command == "verify") {
                    rep = cli_detail::run_verify_point(p, cfg.tol);
                } else if (cfg.command == "audit") {
                    KaehlerPackage pkg = build_family_package(p);
                    rep = run_full_audit(pkg, cfg.tol,
                                         "m=" + std::to_string(p.m) +
                                             " h=" + cli_detail::h_spec_string(p.h_spec));
                } else {  // certify-kaehler
                    KaehlerPackage pkg = build_family_package(p);
                    const CertificateReport cert =
                        kaehler_certificates(pkg.frame, pkg.structure, pkg);
                    rep.point = t;
                    rep.r = pkg.scalar.value();
                    rep.classification = "n/a";
                    rep.entries.push_back(cli_detail::verify_check(
                        "nijenhuis_vanishes", cert.nijenhuis_residual, cert.scale, cfg.tol));
                    rep.entries.push_back(cli_detail::verify_check(
                        "complex_structure_parallel", cert.nabla_j_residual, cert.scale, cfg.tol));
                    rep.entries.push_back(cli_detail::verify_check(
                        "fundamental_form_closed", cert.d_omega_residual, cert.scale, cfg.tol));
                }
                all_pass = all_pass && rep.all_pass();
                if (cfg.format == "json") reports.push_back(audit_report_json(rep, rc.params));
                else render_report_text(body, rep);
            }
            if (cfg.format == "json") body << reports.dump(2) << "\n";
        }

        if (cfg.format == "text")
            body << (all_pass ? "RESULT: pass\n" : "RESULT: fail\n");
        cli_detail::emit(cfg, body.str(), out);
        return all_pass ? 0 : 1;
    } catch (const InvalidParams& e) {
        err << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace curvlab
