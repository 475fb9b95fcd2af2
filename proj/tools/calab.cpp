#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "calab/exec.hpp"
#include "calab/experiment.hpp"
#include "calab/version.hpp"

namespace {

using calab::io::Json;

struct CliState {
    std::string config_path;
    std::vector<std::string> raw_sets;    // --set key=value, applied after the config file
    std::vector<std::string> typed_sets;  // typed flags, applied last
    std::string rules_arg;                // corpus: comma-separated rule specs
    bool all_eca = false;
    int threads = 0;
};

// Typed flags are sugar for config keys; funneling them through the strict
// key=value parser keeps one validation path.
void add_kv_option(CLI::App* sub, CliState& state, const std::string& flag, const std::string& key,
                   const std::string& desc) {
    sub->add_option_function<std::string>(
        flag, [&state, key](const std::string& value) { state.typed_sets.push_back(key + "=" + value); },
        desc);
}

void add_common_options(CLI::App* sub, CliState& state) {
    add_kv_option(sub, state, "--rule", "rule", "Rule spec: eca:<n> or path to a rule file");
    sub->add_option("--config", state.config_path, "key=value config file");
    add_kv_option(sub, state, "--seed", "seed", "64-bit experiment seed");
    add_kv_option(sub, state, "--out", "out", "Output directory (report.json + CSVs)");
    sub->add_option("--set", state.raw_sets, "Extra config overrides as key=value")->take_all();
    sub->add_option("--threads", state.threads, "Cap worker threads (0 = library default)");
}

calab::ExperimentConfig build_config(const CliState& state, calab::ExperimentConfig base) {
    if (!state.config_path.empty()) base = calab::load_config_file(state.config_path, std::move(base));
    std::string overrides;
    for (const std::string& kv : state.raw_sets) overrides += kv + "\n";
    for (const std::string& kv : state.typed_sets) overrides += kv + "\n";
    return calab::parse_config_text(overrides, std::move(base));
}

double total_ms(const Json& report) {
    double total = 0.0;
    for (const auto& item : report.at("timings").items()) total += item.value().get<double>();
    return total;
}

void print_report_summary(const Json& report, const std::string& out_dir) {
    const Json& results = report.at("results");
    std::cout << "rule " << results.at("rule").at("id").get<std::string>() << "  seed "
              << report.at("seed").get<std::uint64_t>() << "\n";
    if (results.contains("surjectivity")) {
        const Json& s = results.at("surjectivity");
        std::cout << "surjectivity: " << (s.at("surjective").get<bool>() ? "surjective" : "not surjective");
        if (!s.at("witness").is_null())
            std::cout << "  (orphan word " << s.at("witness").get<std::string>() << ")";
        std::cout << "\n";
    }
    if (results.contains("kurka")) {
        const Json& k = results.at("kurka");
        std::cout << "kurka: " << k.at("verdict").get<std::string>() << "  (certified words: "
                  << k.at("certificates_total").get<std::uint64_t>() << ")\n";
    }
    if (results.contains("gilman")) {
        const Json& g = results.at("gilman");
        std::cout << "gilman: class " << g.at("class").get<std::string>();
        if (!g.at("direction").is_null()) std::cout << "  [" << g.at("direction").get<std::string>() << "]";
        std::cout << "\n";
    }
    if (results.contains("spectral")) {
        const Json& scan = results.at("spectral").at("scan");
        const Json& rat = results.at("spectral").at("rationality");
        std::cout << "spectral: max atom " << scan.at("max_atom_mass").get<double>() << " at alpha="
                  << scan.at("max_atom_alpha").get<double>() << ", cycle guard "
                  << scan.at("cycle_guard").get<double>() << "\n";
        std::cout << "rationality: " << (rat.at("pass").get<bool>() ? "PASS" : "FAIL") << "  ("
                  << rat.at("flagged").size() << " flagged atom(s), threshold "
                  << rat.at("threshold").get<double>() << ")\n";
    }
    if (results.contains("consistency")) {
        const Json& c = results.at("consistency");
        if (c.at("applicable").get<bool>())
            std::cout << "consistency: " << c.at("statement").get<std::string>() << " -> "
                      << (c.at("rationality_pass").get<bool>() ? "PASS" : "FAIL") << "\n";
    }
    std::cout << "elapsed: " << total_ms(report) << " ms";
    if (!out_dir.empty()) std::cout << "  (report in " << out_dir << ")";
    std::cout << "\n";
}

int run_single(const CliState& state, calab::Task task) {
    calab::ExperimentConfig cfg = build_config(state, {});
    cfg.task = task;
    const Json report = calab::run_experiment(cfg);
    calab::write_report_files(report, cfg.out_dir);
    print_report_summary(report, cfg.out_dir);
    return 0;
}

int run_corpus_cmd(const CliState& state) {
    std::vector<std::string> rules;
    if (state.all_eca)
        for (int n = 0; n < 256; ++n) rules.push_back("eca:" + std::to_string(n));
    if (!state.rules_arg.empty()) {
        std::istringstream in(state.rules_arg);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) rules.push_back(item);
    }
    calab::ExperimentConfig base;
    base.task = calab::Task::Surjectivity;  // cheap default for large corpora
    const calab::ExperimentConfig tmpl = build_config(state, std::move(base));
    const std::vector<calab::CorpusRow> rows = calab::run_corpus(rules, tmpl);

    std::size_t failed = 0;
    for (const calab::CorpusRow& row : rows)
        if (!row.ok) ++failed;
    std::cout << calab::summary_csv(rows);
    std::cout << "corpus: " << rows.size() << " rule(s), " << failed << " failed";
    if (!tmpl.out_dir.empty()) std::cout << "  (summary in " << tmpl.out_dir << "/summary.csv)";
    std::cout << "\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("calab ") + calab::kVersion +
                 " - surjectivity, equicontinuity classification, and spectral probes for 1D cellular "
                 "automata"};
    app.require_subcommand(1);
    CliState state;

    CLI::App* surjectivity = app.add_subcommand("surjectivity", "Exact surjectivity decision");
    CLI::App* kurka = app.add_subcommand("kurka", "Blocking-word search and topological classification");
    CLI::App* gilman = app.add_subcommand("gilman", "Monte Carlo mu-equicontinuity classification");
    CLI::App* spectral = app.add_subcommand("spectral", "Eigenvalue scan and rationality verdict");
    CLI::App* full = app.add_subcommand("full", "All four stages plus the consistency line");
    CLI::App* corpus = app.add_subcommand("corpus", "Batch runs over a list of rules");

    for (CLI::App* sub : {surjectivity, kurka, gilman, spectral, full, corpus})
        add_common_options(sub, state);

    add_kv_option(kurka, state, "--s", "kurka.s", "Window width s (0 = rule radius)");
    add_kv_option(kurka, state, "--max-len", "kurka.max_len", "Max candidate word length");
    add_kv_option(kurka, state, "--T", "kurka.T", "Certification horizon");
    add_kv_option(kurka, state, "--max-contexts", "kurka.max_contexts", "Context enumeration guard");

    add_kv_option(gilman, state, "--m", "gilman.m", "Trace window half-width m");
    add_kv_option(gilman, state, "--n-grid", "gilman.n_grid", "Comma list of agreement radii n");
    add_kv_option(gilman, state, "--ratio-T", "gilman.ratio_T", "Trace horizon for ratio curves");
    add_kv_option(gilman, state, "--ratio-samples", "gilman.ratio_samples", "Samples per ratio estimate");
    add_kv_option(gilman, state, "--ratio-N", "gilman.ratio_N", "Period for ratio sampling");
    add_kv_option(gilman, state, "--ratio-target", "gilman.ratio_target", "Class-B final-ratio target");
    add_kv_option(gilman, state, "--points", "gilman.points", "Base points for ratio curves");
    add_kv_option(gilman, state, "--t-grid", "gilman.t_grid", "Comma list of propagation distances t");
    add_kv_option(gilman, state, "--T", "gilman.prop_T", "Propagation horizon");
    add_kv_option(gilman, state, "--samples", "gilman.prop_samples", "Samples per propagation estimate");
    add_kv_option(gilman, state, "--N", "gilman.prop_N", "Period for propagation sampling");
    add_kv_option(gilman, state, "--p-threshold", "gilman.p_threshold", "Class-C probability threshold");
    add_kv_option(gilman, state, "--i1", "gilman.i1", "Perturbation interval start");
    add_kv_option(gilman, state, "--i2", "gilman.i2", "Perturbation interval end (exclusive)");

    add_kv_option(spectral, state, "--grid", "spectral.grid", "Alpha grid resolution");
    add_kv_option(spectral, state, "--T", "spectral.T", "Wiener sum horizon");
    add_kv_option(spectral, state, "--orbits", "spectral.orbits", "Sampled orbits per scan");
    add_kv_option(spectral, state, "--N", "spectral.N", "Configuration period");
    add_kv_option(spectral, state, "--threshold", "spectral.threshold", "Atom threshold (0 = calibrated default)");
    add_kv_option(spectral, state, "--Q", "spectral.Q", "Rationality denominator bound");

    corpus->add_option("--rules", state.rules_arg, "Comma-separated rule specs");
    corpus->add_flag("--all-eca", state.all_eca, "All 256 elementary rules");
    add_kv_option(corpus, state, "--task", "task", "Template task for each rule");

    CLI11_PARSE(app, argc, argv);

    if (state.threads > 0) calab::exec::set_max_threads(state.threads);

    try {
        if (app.got_subcommand(surjectivity)) return run_single(state, calab::Task::Surjectivity);
        if (app.got_subcommand(kurka)) return run_single(state, calab::Task::Kurka);
        if (app.got_subcommand(gilman)) return run_single(state, calab::Task::Gilman);
        if (app.got_subcommand(spectral)) return run_single(state, calab::Task::Spectral);
        if (app.got_subcommand(full)) return run_single(state, calab::Task::Full);
        if (app.got_subcommand(corpus)) return run_corpus_cmd(state);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
