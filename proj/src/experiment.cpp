#include "calab/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "calab/decider.hpp"
#include "calab/exec.hpp"
#include "calab/version.hpp"

namespace calab {
namespace {

using io::Json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
    throw std::invalid_argument("config value for '" + key + "' is not " + what + ": '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, "an unsigned integer");
    return out;
}

std::int64_t parse_i64(const std::string& key, const std::string& value) {
    std::int64_t out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, "an integer");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    const std::int64_t v = parse_i64(key, value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        bad_value(key, value, "a 32-bit integer");
    return static_cast<int>(v);
}

double parse_double(const std::string& key, const std::string& value) {
    double out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) bad_value(key, value, "a number");
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) out.push_back(parse_int(key, trim(item)));
    if (out.empty()) bad_value(key, value, "a comma-separated integer list");
    return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "rule") cfg.rule_spec = value;
    else if (key == "task") cfg.task = parse_task(value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "kurka.s") cfg.kurka.s = parse_int(key, value);
    else if (key == "kurka.max_len") cfg.kurka.max_len = parse_int(key, value);
    else if (key == "kurka.T") cfg.kurka.T = parse_int(key, value);
    else if (key == "kurka.max_contexts") cfg.kurka.max_contexts = parse_u64(key, value);
    else if (key == "gilman.m") cfg.gilman.m = parse_int(key, value);
    else if (key == "gilman.n_grid") cfg.gilman.n_grid = parse_int_list(key, value);
    else if (key == "gilman.ratio_T") cfg.gilman.ratio_T = parse_int(key, value);
    else if (key == "gilman.ratio_samples") cfg.gilman.ratio_samples = parse_u64(key, value);
    else if (key == "gilman.ratio_N") cfg.gilman.ratio_N = parse_i64(key, value);
    else if (key == "gilman.ratio_target") cfg.gilman.ratio_target = parse_double(key, value);
    else if (key == "gilman.points") cfg.gilman.points = parse_int(key, value);
    else if (key == "gilman.i1") cfg.gilman.i1 = parse_i64(key, value);
    else if (key == "gilman.i2") cfg.gilman.i2 = parse_i64(key, value);
    else if (key == "gilman.t_grid") cfg.gilman.t_grid = parse_int_list(key, value);
    else if (key == "gilman.prop_T") cfg.gilman.prop_T = parse_int(key, value);
    else if (key == "gilman.prop_samples") cfg.gilman.prop_samples = parse_u64(key, value);
    else if (key == "gilman.prop_N") cfg.gilman.prop_N = parse_i64(key, value);
    else if (key == "gilman.p_threshold") cfg.gilman.p_threshold = parse_double(key, value);
    else if (key == "spectral.grid") cfg.spectral.grid = parse_int(key, value);
    else if (key == "spectral.T") cfg.spectral.T = parse_int(key, value);
    else if (key == "spectral.orbits") cfg.spectral.orbits = parse_u64(key, value);
    else if (key == "spectral.N") cfg.spectral.N = parse_i64(key, value);
    else if (key == "spectral.threshold") cfg.spectral.threshold = parse_double(key, value);
    else if (key == "spectral.Q") cfg.spectral.den_bound = parse_int(key, value);
    else throw std::invalid_argument("unknown config key: '" + key + "'");
}

double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

Json config_json(const ExperimentConfig& cfg) {
    Json j;
    j["rule"] = cfg.rule_spec;
    j["task"] = to_string(cfg.task);
    j["seed"] = cfg.seed;
    Json k;
    k["s"] = cfg.kurka.s;
    k["max_len"] = cfg.kurka.max_len;
    k["T"] = cfg.kurka.T;
    k["max_contexts"] = cfg.kurka.max_contexts;
    j["kurka"] = std::move(k);
    Json g;
    g["m"] = cfg.gilman.m;
    g["n_grid"] = cfg.gilman.n_grid;
    g["ratio_T"] = cfg.gilman.ratio_T;
    g["ratio_samples"] = cfg.gilman.ratio_samples;
    g["ratio_N"] = cfg.gilman.ratio_N;
    g["ratio_target"] = cfg.gilman.ratio_target;
    g["points"] = cfg.gilman.points;
    g["i1"] = cfg.gilman.i1;
    g["i2"] = cfg.gilman.i2;
    g["t_grid"] = cfg.gilman.t_grid;
    g["prop_T"] = cfg.gilman.prop_T;
    g["prop_samples"] = cfg.gilman.prop_samples;
    g["prop_N"] = cfg.gilman.prop_N;
    g["p_threshold"] = cfg.gilman.p_threshold;
    j["gilman"] = std::move(g);
    Json s;
    s["grid"] = cfg.spectral.grid;
    s["T"] = cfg.spectral.T;
    s["orbits"] = cfg.spectral.orbits;
    s["N"] = cfg.spectral.N;
    s["threshold"] = cfg.spectral.threshold;
    s["Q"] = cfg.spectral.den_bound;
    j["spectral"] = std::move(s);
    return j;
}

std::string sanitize_component(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const bool keep = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          c == '-' || c == '.';
        out.push_back(keep ? c : '_');
    }
    if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
    return out;
}

std::string csv_cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

std::string to_string(Task task) {
    switch (task) {
        case Task::Surjectivity: return "surjectivity";
        case Task::Kurka: return "kurka";
        case Task::Gilman: return "gilman";
        case Task::Spectral: return "spectral";
        default: return "full";
    }
}

Task parse_task(const std::string& name) {
    if (name == "surjectivity") return Task::Surjectivity;
    if (name == "kurka") return Task::Kurka;
    if (name == "gilman") return Task::Gilman;
    if (name == "spectral") return Task::Spectral;
    if (name == "full") return Task::Full;
    throw std::invalid_argument("unknown task: '" + name + "'");
}

void ExperimentConfig::validate() const {
    const auto need = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    need(!rule_spec.empty(), "rule must be set");
    need(kurka.s >= 0, "kurka.s must be >= 0");
    need(kurka.max_len >= 1, "kurka.max_len must be >= 1");
    need(kurka.T >= 1, "kurka.T must be >= 1");
    need(kurka.max_contexts >= 1, "kurka.max_contexts must be >= 1");
    need(gilman.m >= 1, "gilman.m must be >= 1");
    need(!gilman.n_grid.empty(), "gilman.n_grid must be nonempty");
    need(gilman.ratio_T >= 1, "gilman.ratio_T must be >= 1");
    need(gilman.ratio_samples >= 1, "gilman.ratio_samples must be >= 1");
    need(gilman.ratio_N >= 1, "gilman.ratio_N must be >= 1");
    need(gilman.ratio_target > 0.0 && gilman.ratio_target <= 1.0, "gilman.ratio_target must be in (0,1]");
    need(gilman.points >= 1, "gilman.points must be >= 1");
    need(gilman.i1 < gilman.i2, "gilman.i1 must be < gilman.i2");
    need(!gilman.t_grid.empty(), "gilman.t_grid must be nonempty");
    need(gilman.prop_T >= 1, "gilman.prop_T must be >= 1");
    need(gilman.prop_samples >= 1, "gilman.prop_samples must be >= 1");
    need(gilman.prop_N >= 1, "gilman.prop_N must be >= 1");
    need(gilman.p_threshold > 0.0 && gilman.p_threshold <= 1.0, "gilman.p_threshold must be in (0,1]");
    need(spectral.grid >= 1, "spectral.grid must be >= 1");
    need(spectral.T >= 1, "spectral.T must be >= 1");
    need(spectral.orbits >= 1, "spectral.orbits must be >= 1");
    need(spectral.N >= 1, "spectral.N must be >= 1");
    need(spectral.threshold >= 0.0, "spectral.threshold must be >= 0");
    need(spectral.den_bound >= 1, "spectral.Q must be >= 1");
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + " is not key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + " has an empty key");
        if (value.empty() && key != "out")
            throw std::invalid_argument("config line " + std::to_string(lineno) + " has an empty value");
        apply_key(base, key, value);
    }
    return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), std::move(base));
}

std::pair<LocalRule, std::string> parse_rule_spec(const std::string& spec) {
    if (spec.rfind("eca:", 0) == 0) {
        const int n = parse_int("rule", spec.substr(4));
        return {wolfram_rule(n), spec};
    }
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("cannot open rule file: " + spec);
    std::vector<std::string> payload;
    std::string line;
    while (std::getline(in, line) && payload.size() < 2) {
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (!stripped.empty()) payload.push_back(stripped);
    }
    if (payload.size() < 2)
        throw std::invalid_argument("rule file needs a 'k r' line and a table line: " + spec);
    std::istringstream header(payload[0]);
    int k = 0, r = -1;
    std::string extra;
    if (!(header >> k >> r) || (header >> extra))
        throw std::invalid_argument("rule file header must be 'k r': " + spec);
    if (k < 2 || k > 36) throw std::invalid_argument("rule file alphabet size must be in 2..36");
    if (r < 0) throw std::invalid_argument("rule file radius must be >= 0");
    const Alphabet alphabet(k);
    return {LocalRule(alphabet, r, parse_word(payload[1], alphabet)), spec};
}

io::Json run_experiment(const ExperimentConfig& config) {
    config.validate();
    auto [rule, id] = parse_rule_spec(config.rule_spec);

    ExperimentConfig cfg = config;
    cfg.gilman.kurka = cfg.kurka;  // one knob drives both the stage and gilman's class-A check

    Json results;
    Json timings;
    results["rule"] = io::rule_json(rule, id);

    std::optional<SurjectivityReport> surj;
    std::optional<GilmanClass> gclass;
    std::optional<RationalityVerdict> rat;

    const bool full = cfg.task == Task::Full;
    const auto run_timed = [&timings](const char* name, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        timings[name] = std::chrono::duration<double, std::milli>(stop - start).count();
    };

    if (full || cfg.task == Task::Surjectivity)
        run_timed("surjectivity_ms", [&] {
            surj = is_surjective(rule);
            results["surjectivity"] = io::surjectivity_json(*surj);
        });
    if (full || cfg.task == Task::Kurka)
        run_timed("kurka_ms", [&] { results["kurka"] = io::kurka_json(classify_kurka(rule, cfg.kurka)); });
    if (full || cfg.task == Task::Gilman)
        run_timed("gilman_ms", [&] {
            const GilmanVerdict verdict = classify_gilman(rule, cfg.gilman, SeedStream{cfg.seed, 2});
            gclass = verdict.cls;
            results["gilman"] = io::gilman_json(verdict);
        });
    if (full || cfg.task == Task::Spectral)
        run_timed("spectral_ms", [&] {
            const BernoulliMeasure mu = BernoulliMeasure::uniform(rule.alphabet());
            const Observable g = Observable::letter_at_origin(mu);
            const SpectralScan scan =
                eigenvalue_scan(rule, mu, g, uniform_alpha_grid(cfg.spectral.grid), cfg.spectral.T,
                                cfg.spectral.orbits, cfg.spectral.N, SeedStream{cfg.seed, 3});
            const double threshold = cfg.spectral.threshold > 0.0
                                         ? cfg.spectral.threshold
                                         : default_scan_threshold(cfg.spectral.T);
            rat = rationality_verdict(scan, threshold, cfg.spectral.den_bound);
            Json spectral;
            spectral["scan"] = io::scan_json(scan);
            spectral["rationality"] = io::rationality_json(*rat);
            double max_off = 0.0;
            for (std::size_t i = 0; i < scan.alpha_grid.size(); ++i) {
                const double alpha = scan.alpha_grid[i];
                const double d = circle_dist(alpha, best_rational(alpha, cfg.spectral.den_bound).value());
                if (d > rat->grid_step) max_off = std::max(max_off, scan.atom_mass[i]);
            }
            spectral["max_off_rational_atom_mass"] = max_off;
            results["spectral"] = std::move(spectral);
        });

    if (full) {
        // The theorem under test: a surjective rule that is mu-equicontinuous
        // almost everywhere cannot carry an irrational eigenvalue.
        Json consistency;
        const bool applicable = surj && surj->surjective && gclass && *gclass == GilmanClass::C;
        consistency["applicable"] = applicable;
        if (applicable) {
            consistency["statement"] =
                "surjective and mu-equicontinuous a.e. (class C): every spectral atom must sit on a rational";
            consistency["rationality_pass"] = rat ? Json(rat->pass) : Json(nullptr);
        }
        results["consistency"] = std::move(consistency);
    }

    Json report;
    report["schema"] = kReportSchema;
    report["version"] = kVersion;
    report["seed"] = cfg.seed;
    report["config"] = config_json(cfg);
    report["results"] = std::move(results);
    report["timings"] = std::move(timings);
    return report;
}

void write_report_files(const io::Json& report, const std::string& out_dir) {
    if (out_dir.empty()) return;
    io::write_file_atomic(out_dir + "/report.json", report.dump(2) + "\n");
    const io::Json& results = report.at("results");
    if (results.contains("spectral")) {
        const io::Json& scan = results.at("spectral").at("scan");
        const io::Json& alphas = scan.at("alpha_grid");
        const io::Json& masses = scan.at("atom_mass");
        const double guard = scan.at("cycle_guard").get<double>();
        std::string csv = "alpha,atom_mass,guard\n";
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            csv += io::format_double(alphas[i].get<double>());
            csv += ',';
            csv += io::format_double(masses[i].get<double>());
            csv += ',';
            csv += io::format_double(guard);
            csv += '\n';
        }
        io::write_file_atomic(out_dir + "/scan.csv", csv);
    }
    if (results.contains("gilman")) {
        const io::Json& gilman = results.at("gilman");
        std::string csv = "t,p_hat,ci_lo,ci_hi,direction\n";
        for (const char* section : {"left_profile", "right_profile"}) {
            for (const io::Json& est : gilman.at(section)) {
                csv += std::to_string(est.at("t").get<int>());
                csv += ',';
                csv += io::format_double(est.at("p_hat").get<double>());
                csv += ',';
                csv += io::format_double(est.at("ci_lo").get<double>());
                csv += ',';
                csv += io::format_double(est.at("ci_hi").get<double>());
                csv += ',';
                csv += est.at("direction").get<std::string>();
                csv += '\n';
            }
        }
        io::write_file_atomic(out_dir + "/profile.csv", csv);
    }
}

std::string summary_csv(const std::vector<CorpusRow>& rows) {
    std::string out = "rule,surjective,kurka,gilman,max_off_rational_atom_mass\n";
    for (const CorpusRow& row : rows) {
        out += csv_cell(row.rule);
        out += ',';
        out += csv_cell(row.surjective);
        out += ',';
        out += csv_cell(row.kurka);
        out += ',';
        out += csv_cell(row.gilman);
        out += ',';
        out += csv_cell(row.max_off_rational);
        out += '\n';
    }
    return out;
}

std::vector<CorpusRow> run_corpus(const std::vector<std::string>& rule_specs,
                                  const ExperimentConfig& tmpl) {
    if (rule_specs.empty()) throw std::invalid_argument("corpus must contain at least one rule");
    std::vector<CorpusRow> rows(rule_specs.size());
    exec::parallel_for(rule_specs.size(), [&](std::size_t i) {
        CorpusRow& row = rows[i];
        row.rule = rule_specs[i];
        ExperimentConfig cfg = tmpl;
        cfg.rule_spec = rule_specs[i];
        cfg.out_dir =
            tmpl.out_dir.empty() ? std::string{} : tmpl.out_dir + "/" + sanitize_component(rule_specs[i]);
        try {
            const io::Json report = run_experiment(cfg);
            write_report_files(report, cfg.out_dir);
            const io::Json& results = report.at("results");
            if (results.contains("surjectivity"))
                row.surjective = results.at("surjectivity").at("surjective").get<bool>() ? "true" : "false";
            if (results.contains("kurka")) row.kurka = results.at("kurka").at("verdict").get<std::string>();
            if (results.contains("gilman")) row.gilman = results.at("gilman").at("class").get<std::string>();
            if (results.contains("spectral"))
                row.max_off_rational = io::format_double(
                    results.at("spectral").at("max_off_rational_atom_mass").get<double>());
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            row.surjective = row.kurka = row.gilman = row.max_off_rational = "error";
            if (!cfg.out_dir.empty()) {
                try {
                    io::write_file_atomic(cfg.out_dir + "/error.txt", row.error + "\n");
                } catch (...) {
                }
            }
        }
    });
    if (!tmpl.out_dir.empty()) io::write_file_atomic(tmpl.out_dir + "/summary.csv", summary_csv(rows));
    return rows;
}

}  // namespace calab
