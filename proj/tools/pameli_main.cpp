// pameli CLI: benchmark runner, reference-front generator and plotter.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "pameli/harness.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"PAMELI: Pareto set approximation by meta-exploration of landscape identifiers"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a benchmark experiment");
    std::string problem, variant, config_file, out_dir;
    int runs = 0, iterations = 0, threads = 0;
    std::uint64_t seed = 0;
    bool dump = false;
    std::vector<std::string> set_keys;
    auto* opt_problem = run->add_option("--problem", problem, "dtlz1..dtlz7");
    auto* opt_variant = run->add_option("--variant", variant, "full|baseline|ome|oms");
    auto* opt_runs = run->add_option("--runs", runs, "independent runs");
    auto* opt_iters = run->add_option("--iterations", iterations, "iterations per run");
    auto* opt_seed = run->add_option("--seed", seed, "base seed (run r uses seed + r)");
    auto* opt_out = run->add_option("--out", out_dir, "output directory");
    run->add_option("--config", config_file, "key = value config file");
    auto* opt_threads = run->add_option("--threads", threads, "worker cap (also PAMELI_THREADS)");
    run->add_flag("--dump-models", dump, "write best-LI surrogate checkpoints");
    run->add_option("--set", set_keys, "extra config entries, key=value");

    auto* front = app.add_subcommand("front", "generate a reference front file");
    std::string front_problem, front_out;
    int front_size = 10000;
    front->add_option("--problem", front_problem, "dtlz1..dtlz7")->required();
    front->add_option("--size", front_size, "target point count");
    front->add_option("--out", front_out, "output file")->required();

    auto* plot = app.add_subcommand("plot", "render an SVG from a results directory");
    std::string plot_in, plot_out;
    plot->add_option("--in", plot_in, "directory holding results.csv")->required();
    plot->add_option("--out", plot_out, "SVG output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) {
            pameli::ExperimentConfig config;
            if (!config_file.empty())
                config = pameli::load_config_file(config_file);
            if (opt_problem->count())
                config.problem = problem;
            if (opt_variant->count())
                config.algo.variant = pameli::variant_from_string(variant);
            if (opt_runs->count())
                config.runs = runs;
            if (opt_iters->count()) {
                config.iterations = iterations;
                config.algo.iterations = iterations;
            }
            if (opt_seed->count())
                config.seed = seed;
            if (opt_out->count())
                config.output_dir = out_dir;
            if (opt_threads->count())
                config.threads = threads;
            if (dump)
                config.dump_models = true;
            for (const std::string& kv : set_keys) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
                pameli::apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
            }
            config.validate();

            const pameli::ExperimentRecord record = pameli::run_experiment(config);
            std::printf("problem=%s variant=%s runs=%d iterations=%d\n", config.problem.c_str(),
                        pameli::to_string(config.algo.variant).c_str(), config.runs, config.iterations);
            std::printf("final IGD  mean=%.6f std=%.6f\n", record.final_igd_mean(), record.final_igd_std());
            std::printf("C(archive) mean=%.6f std=%.6f\n", record.c_archive_mean(), record.c_archive_std());
            std::printf("C(X_f)     mean=%.6f std=%.6f\n", record.c_xf_mean(), record.c_xf_std());
            std::printf("results in %s\n", config.output_dir.string().c_str());
            return 0;
        }
        if (front->parsed()) {
            if (front_problem.size() != 5 || front_problem.rfind("dtlz", 0) != 0)
                throw std::invalid_argument("unknown problem '" + front_problem + "'");
            const pameli::DtlzInstance instance = pameli::DtlzInstance::paper(front_problem[4] - '0');
            const pameli::ReferenceFront f =
                pameli::generate_reference_front(instance, static_cast<std::size_t>(front_size));
            pameli::save_reference_front(f, instance, front_out);
            std::printf("wrote %zu points to %s\n", f.points.size(), front_out.c_str());
            return 0;
        }
        if (plot->parsed()) {
            const pameli::LoadedResults results =
                pameli::load_results_csv(std::filesystem::path(plot_in) / "results.csv");
            pameli::emit_convergence_plot(results, plot_in, plot_out);
            std::printf("wrote %s\n", plot_out.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
