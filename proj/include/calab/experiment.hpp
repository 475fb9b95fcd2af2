#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "calab/gilman.hpp"
#include "calab/json_io.hpp"
#include "calab/spectral.hpp"

namespace calab {

enum class Task { Surjectivity, Kurka, Gilman, Spectral, Full };

std::string to_string(Task task);
Task parse_task(const std::string& name);

struct SpectralParams {
    int grid = 1024;   // uniform alpha grid resolution
    int T = 1024;
    std::uint64_t orbits = 100;
    Index N = 4096;
    double threshold = 0.0;  // <= 0 means default_scan_threshold(T)
    int den_bound = 64;      // Q in the rationality verdict
};

struct ExperimentConfig {
    std::string rule_spec = "eca:90";
    Task task = Task::Full;
    std::uint64_t seed = 1;
    std::string out_dir;  // empty: run without writing files

    KurkaParams kurka;
    GilmanParams gilman;
    SpectralParams spectral;

    void validate() const;  // throws std::invalid_argument
};

// Strict key=value format: '#' comments, unknown keys rejected. `base` seeds
// the defaults so CLI flags can layer on top of a config file.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

// "eca:<n>" or a path to a rule file ("k r" line + table line, base 36).
std::pair<LocalRule, std::string> parse_rule_spec(const std::string& spec);

// Executes the configured task pipeline. The returned report's "results"
// section is byte-deterministic for a fixed (config, seed); wall-clock goes
// into a separate "timings" section.
io::Json run_experiment(const ExperimentConfig& config);

// report.json plus scan.csv / profile.csv for whichever tasks ran.
void write_report_files(const io::Json& report, const std::string& out_dir);

struct CorpusRow {
    std::string rule;
    bool ok = false;
    std::string error;
    std::string surjective = "-";
    std::string kurka = "-";
    std::string gilman = "-";
    std::string max_off_rational = "-";
};

std::string summary_csv(const std::vector<CorpusRow>& rows);

// One experiment per rule with isolated failures; per-rule report directories
// plus summary.csv under tmpl.out_dir when set. Rows keep input order.
std::vector<CorpusRow> run_corpus(const std::vector<std::string>& rule_specs,
                                  const ExperimentConfig& tmpl);

}  // namespace calab
