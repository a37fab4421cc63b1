#pragma once

// JSON and text rendering of reports. JSON uses insertion-ordered objects so
// identical runs serialize byte-identically and reports survive a
// parse/serialize round trip unchanged.

#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "curvlab/audit.hpp"

namespace curvlab {

using ordered_json = nlohmann::ordered_json;

inline ordered_json entry_json(const AuditEntry& e) {
    ordered_json j;
    j["id"] = e.id;
    j["residual"] = e.residual;
    j["scale"] = e.scale;
    j["verdict"] = to_string(e.verdict);
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

inline ordered_json audit_report_json(const AuditReport& rep, const ordered_json& params) {
    ordered_json j;
    j["params"] = params;
    j["point"] = rep.point;
    ordered_json entries = ordered_json::array();
    for (const auto& e : rep.entries) entries.push_back(entry_json(e));
    j["entries"] = entries;
    j["f_hat"] = rep.f_hat;
    j["r"] = rep.r;
    j["classification"] = rep.classification;
    return j;
}

inline void render_report_text(std::ostream& os, const AuditReport& rep) {
    os << "point t = " << rep.point;
    if (!rep.params_desc.empty()) os << "  (" << rep.params_desc << ")";
    os << "\n";
    os << "  f_hat = " << std::setprecision(12) << rep.f_hat << ", r = " << rep.r
       << ", classification = " << rep.classification << "\n";
    for (const auto& e : rep.entries) {
        os << "  " << std::left << std::setw(36) << e.id << std::setw(24)
           << to_string(e.verdict);
        if (e.verdict != AuditVerdict::skipped)
            os << "residual " << std::scientific << std::setprecision(3) << e.residual
               << std::defaultfloat << " (scale " << std::setprecision(3) << e.scale << ")";
        else if (!e.note.empty())
            os << e.note;
        os << "\n" << std::setprecision(12);
    }
}

struct ScanRecord {
    double point = 0.0;
    double f_hat = 0.0;
    bool f_positive = false;
    double r = 0.0;
    bool r_constant = false;
    bool einstein = false;
    double grad_r_norm = 0.0;  // |nabla R|
    std::string classification;
};

inline ordered_json scan_record_json(const ScanRecord& rec) {
    ordered_json j;
    j["point"] = rec.point;
    j["f_hat"] = rec.f_hat;
    j["f_positive"] = rec.f_positive;
    j["r"] = rec.r;
    j["r_constant"] = rec.r_constant;
    j["einstein"] = rec.einstein;
    j["grad_r_norm"] = rec.grad_r_norm;
    j["classification"] = rec.classification;
    return j;
}

inline void render_scan_text(std::ostream& os, const ScanRecord& rec) {
    os << "t = " << std::setw(10) << rec.point << "  f_hat = " << std::setw(14)
       << std::setprecision(8) << rec.f_hat << (rec.f_positive ? " (>0)" : " (<=0)")
       << "  r = " << std::setw(12) << rec.r << (rec.r_constant ? " const" : " varies")
       << (rec.einstein ? "  einstein" : "")
       << "  |grad R| = " << std::setprecision(6) << rec.grad_r_norm << "  "
       << rec.classification << "\n" << std::setprecision(12);
}

} // namespace curvlab
