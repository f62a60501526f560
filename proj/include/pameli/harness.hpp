#ifndef PAMELI_HARNESS_HPP
#define PAMELI_HARNESS_HPP

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pameli/engine.hpp"

namespace pameli {

// Everything a benchmark experiment needs; defaults reproduce the reference
// setup, so an empty config file runs it unchanged.
struct ExperimentConfig {
    std::string problem = "dtlz2"; // dtlz1..dtlz7
    int runs = 30;
    int iterations = 10;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "pameli_out";
    std::filesystem::path front_cache; // defaults to output_dir / "fronts"
    int front_size = 10000;
    double confidence = 0.95;
    int threads = 0; // 0: PAMELI_THREADS, then hardware
    bool dump_models = false;

    PameliConfig algo{};

    void validate() const;
    std::filesystem::path front_cache_dir() const
    {
        return front_cache.empty() ? output_dir / "fronts" : front_cache;
    }
};

// key = value lines, '#' comments; unknown keys are an error.
ExperimentConfig load_config_file(const std::filesystem::path& file, ExperimentConfig base = {});
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

struct RunResult {
    std::vector<IterationRecord> trace;
    double c_archive = 0.0;
    double c_xf = 0.0;
    std::string final_best_li;
};

struct ExperimentRecord {
    ExperimentConfig config;
    std::vector<RunResult> runs;

    double final_igd_mean() const;
    double final_igd_std() const;
    double c_archive_mean() const;
    double c_archive_std() const;
    double c_xf_mean() const;
    double c_xf_std() const;
    // mean archive IGD and confidence half-width per iteration (normal
    // approximation at config.confidence)
    std::vector<std::array<double, 3>> iteration_bands() const;
};

// Runs the configured experiment (run r is seeded seed + r) and writes
// results.csv, li_distribution.csv and the convergence plot into output_dir.
ExperimentRecord run_experiment(const ExperimentConfig& config);

// results.csv: fixed "run,iteration,evals,igd_archive,igd_xf,hv_archive,best_li"
// schema plus a '#'-prefixed summary block.
void write_results_csv(const ExperimentRecord& record, const std::filesystem::path& file);

struct LoadedResults {
    std::vector<std::vector<std::string>> rows; // data rows, split by comma
    std::map<std::string, double> stats;
    std::vector<std::array<double, 3>> iteration_bands;
    int runs = 0;
    int iterations = 0;
};

// Parses and validates a results.csv written by write_results_csv.
LoadedResults load_results_csv(const std::filesystem::path& file);

// SVG convergence curve with shaded confidence band plus a sibling .dat file
// (columns: iteration, mean, half-width).
void emit_convergence_plot(const ExperimentRecord& record, const std::filesystem::path& svg_file);
void emit_convergence_plot(const LoadedResults& results, const std::string& title,
                           const std::filesystem::path& svg_file);

// Family counts (surrogates per objective gene, optimizers per run) of the
// final best LIs, one CSV row per experiment.
void emit_li_distribution(std::span<const ExperimentRecord> records, const std::filesystem::path& file);

// Inverse standard normal CDF (bisection on erf), for the confidence bands.
double normal_quantile(double p);

} // namespace pameli

#endif
