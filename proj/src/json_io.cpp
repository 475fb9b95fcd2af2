#include "calab/json_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace calab::io {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

Json rule_json(const LocalRule& rule, const std::string& id) {
    Json j;
    j["id"] = id;
    j["alphabet_size"] = rule.alphabet().size();
    j["radius"] = rule.radius();
    if (rule.alphabet().size() <= 36) j["table"] = word_string(rule.table());
    return j;
}

Json surjectivity_json(const SurjectivityReport& report) {
    Json j;
    j["surjective"] = report.surjective;
    j["witness"] = report.witness ? Json(word_string(*report.witness)) : Json(nullptr);
    j["method"] = report.method;
    j["automaton_states"] = report.automaton_states;
    j["subsets_explored"] = report.subsets_explored;
    return j;
}

Json certificate_json(const BlockingCertificate& cert) {
    Json j;
    j["word"] = word_string(cert.word);
    j["s"] = cert.s;
    j["p"] = cert.p;
    j["T"] = cert.T;
    j["status"] = to_string(cert.status);
    j["method"] = cert.method;
    j["contexts_checked"] = cert.contexts_checked;
    if (cert.counterexample) {
        const BlockingCounterexample& ce = *cert.counterexample;
        Json c;
        c["hull_lo"] = ce.hull_lo;
        c["x"] = word_string(ce.x_cells);
        c["y"] = word_string(ce.y_cells);
        c["first_bad_step"] = ce.first_bad_step;
        j["counterexample"] = std::move(c);
    } else {
        j["counterexample"] = nullptr;
    }
    return j;
}

Json kurka_json(const KurkaReport& report) {
    Json j;
    j["verdict"] = to_string(report.verdict);
    j["s"] = report.s;
    j["max_len"] = report.max_len;
    j["T"] = report.T;
    j["certificates_total"] = report.certificates.size();
    Json certs = Json::array();
    // keep reports compact: the full list can run to hundreds for rules where
    // every word blocks
    constexpr std::size_t kMaxListed = 16;
    for (std::size_t i = 0; i < report.certificates.size() && i < kMaxListed; ++i)
        certs.push_back(certificate_json(report.certificates[i]));
    j["certificates"] = std::move(certs);
    return j;
}

Json ratio_json(const RatioEstimate& est) {
    Json j;
    j["m"] = est.m;
    j["n"] = est.n;
    j["T"] = est.T;
    j["samples"] = est.samples;
    j["ratio_hat"] = est.ratio_hat;
    j["ci_lo"] = est.ci.lo;
    j["ci_hi"] = est.ci.hi;
    return j;
}

Json propagation_json(const PropagationEstimate& est) {
    Json j;
    j["t"] = est.t;
    j["T"] = est.T;
    j["samples"] = est.samples;
    j["p_hat"] = est.p_hat;
    j["ci_lo"] = est.ci.lo;
    j["ci_hi"] = est.ci.hi;
    j["direction"] = to_string(est.direction);
    return j;
}

Json gilman_json(const GilmanVerdict& verdict) {
    Json j;
    j["class"] = to_string(verdict.cls);
    j["direction"] = verdict.direction ? Json(to_string(*verdict.direction)) : Json(nullptr);
    j["kurka"] = kurka_json(verdict.kurka);
    Json curves = Json::array();
    for (const auto& curve : verdict.curves) {
        Json pts = Json::array();
        for (const RatioEstimate& est : curve) pts.push_back(ratio_json(est));
        curves.push_back(std::move(pts));
    }
    j["curves"] = std::move(curves);
    Json left = Json::array();
    for (const PropagationEstimate& est : verdict.left_profile) left.push_back(propagation_json(est));
    j["left_profile"] = std::move(left);
    Json right = Json::array();
    for (const PropagationEstimate& est : verdict.right_profile) right.push_back(propagation_json(est));
    j["right_profile"] = std::move(right);
    Json params;
    params["m"] = verdict.params.m;
    params["n_grid"] = verdict.params.n_grid;
    params["ratio_T"] = verdict.params.ratio_T;
    params["ratio_samples"] = verdict.params.ratio_samples;
    params["ratio_N"] = verdict.params.ratio_N;
    params["ratio_target"] = verdict.params.ratio_target;
    params["points"] = verdict.params.points;
    params["i1"] = verdict.params.i1;
    params["i2"] = verdict.params.i2;
    params["t_grid"] = verdict.params.t_grid;
    params["prop_T"] = verdict.params.prop_T;
    params["prop_samples"] = verdict.params.prop_samples;
    params["prop_N"] = verdict.params.prop_N;
    params["p_threshold"] = verdict.params.p_threshold;
    j["params"] = std::move(params);
    return j;
}

Json scan_json(const SpectralScan& scan) {
    Json j;
    j["T"] = scan.T;
    j["orbits"] = scan.orbits;
    j["N"] = scan.N;
    j["observable"] = scan.observable;
    j["points"] = scan.alpha_grid.size();
    j["cycle_guard"] = scan.cycle_guard;
    j["guard_limit"] = scan.guard_limit;
    j["guard_exceeded"] = scan.guard_exceeded;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < scan.atom_mass.size(); ++i)
        if (scan.atom_mass[i] > scan.atom_mass[arg]) arg = i;
    if (!scan.atom_mass.empty()) {
        j["max_atom_alpha"] = scan.alpha_grid[arg];
        j["max_atom_mass"] = scan.atom_mass[arg];
    }
    j["alpha_grid"] = scan.alpha_grid;
    j["atom_mass"] = scan.atom_mass;
    return j;
}

Json rationality_json(const RationalityVerdict& verdict) {
    Json j;
    j["pass"] = verdict.pass;
    j["threshold"] = verdict.threshold;
    j["den_bound"] = verdict.den_bound;
    j["grid_step"] = verdict.grid_step;
    Json flagged = Json::array();
    for (const FlaggedAtom& atom : verdict.flagged) {
        Json f;
        f["alpha"] = atom.alpha;
        f["atom_mass"] = atom.atom_mass;
        f["matched"] = atom.matched.str();
        f["distance"] = atom.distance;
        f["within_grid"] = atom.within_grid;
        flagged.push_back(std::move(f));
    }
    j["flagged"] = std::move(flagged);
    return j;
}

Json correlation_json(const std::vector<CorrelationPoint>& points) {
    Json arr = Json::array();
    for (const CorrelationPoint& pt : points) {
        Json j;
        j["n"] = pt.n;
        j["joint_hat"] = pt.joint_hat;
        j["product"] = pt.product;
        j["estimate"] = pt.estimate;
        j["ci_lo"] = pt.ci.lo;
        j["ci_hi"] = pt.ci.hi;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string scan_csv(const SpectralScan& scan) {
    std::string out = "alpha,atom_mass,guard\n";
    for (std::size_t i = 0; i < scan.alpha_grid.size(); ++i) {
        out += format_double(scan.alpha_grid[i]);
        out += ',';
        out += format_double(scan.atom_mass[i]);
        out += ',';
        out += format_double(scan.cycle_guard);
        out += '\n';
    }
    return out;
}

std::string profile_csv(const GilmanVerdict& verdict) {
    std::string out = "t,p_hat,ci_lo,ci_hi,direction\n";
    const auto emit = [&out](const PropagationEstimate& est) {
        out += std::to_string(est.t);
        out += ',';
        out += format_double(est.p_hat);
        out += ',';
        out += format_double(est.ci.lo);
        out += ',';
        out += format_double(est.ci.hi);
        out += ',';
        out += to_string(est.direction);
        out += '\n';
    };
    for (const PropagationEstimate& est : verdict.left_profile) emit(est);
    for (const PropagationEstimate& est : verdict.right_profile) emit(est);
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace calab::io
