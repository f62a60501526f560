#include "pameli/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pameli/indicators.hpp"
#include "pameli/parallel.hpp"

namespace pameli {

namespace {

const char* CSV_HEADER = "run,iteration,evals,igd_archive,igd_xf,hv_archive,best_li";

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v)
{
    if (v.size() < 2)
        return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(const std::string& s)
{
    const std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int parse_variant_number(const std::string& problem)
{
    if (problem.size() == 5 && problem.rfind("dtlz", 0) == 0 && problem[4] >= '1' && problem[4] <= '7')
        return problem[4] - '0';
    throw std::invalid_argument("unknown problem '" + problem + "' (expected dtlz1..dtlz7)");
}

} // namespace

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    auto cdf = [](double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); };
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void ExperimentConfig::validate() const
{
    parse_variant_number(problem);
    if (runs < 1)
        throw std::invalid_argument("runs must be >= 1");
    if (iterations < 2)
        throw std::invalid_argument("iterations must be >= 2 (the convergence indicator needs an interval)");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("confidence must be in (0, 1)");
    if (front_size < 3)
        throw std::invalid_argument("front_size must be >= 3");
    if (algo.li_population < 1 || algo.initial_sample < 1 || algo.eps_size < 1 || algo.best_li_samples < 1)
        throw std::invalid_argument("algorithm sizes must be positive");
    if (algo.surrogate_pool.empty() || algo.optimizer_pool.empty())
        throw std::invalid_argument("surrogate and optimizer pools must be non-empty");
}

void apply_config_entry(ExperimentConfig& config, const std::string& raw_key, const std::string& raw_value)
{
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    auto as_int = [&] { return std::stoi(value); };
    auto as_u64 = [&] { return std::stoull(value); };
    auto as_double = [&] { return std::stod(value); };
    auto as_bool = [&] {
        if (value == "true" || value == "1")
            return true;
        if (value == "false" || value == "0")
            return false;
        throw std::invalid_argument("config: boolean expected for '" + key + "'");
    };

    if (key == "problem")
        config.problem = value;
    else if (key == "variant")
        config.algo.variant = variant_from_string(value);
    else if (key == "runs")
        config.runs = as_int();
    else if (key == "iterations") {
        config.iterations = as_int();
        config.algo.iterations = config.iterations;
    } else if (key == "seed")
        config.seed = as_u64();
    else if (key == "out")
        config.output_dir = value;
    else if (key == "front_size")
        config.front_size = as_int();
    else if (key == "front_cache")
        config.front_cache = value;
    else if (key == "confidence")
        config.confidence = as_double();
    else if (key == "threads")
        config.threads = as_int();
    else if (key == "dump_models")
        config.dump_models = as_bool();
    else if (key == "li_population")
        config.algo.li_population = as_int();
    else if (key == "initial_sample")
        config.algo.initial_sample = as_int();
    else if (key == "eps_size")
        config.algo.eps_size = as_int();
    else if (key == "best_li_samples")
        config.algo.best_li_samples = as_int();
    else if (key == "meta_crossover_prob")
        config.algo.meta_crossover_prob = as_double();
    else if (key == "meta_mutation_prob")
        config.algo.meta_mutation_prob = as_double();
    else if (key == "optimizer_population")
        config.algo.optimizer_population = as_int();
    else if (key == "optimizer_generations")
        config.algo.optimizer_generations = as_int();
    else if (key == "train_max_epochs")
        config.algo.trainer.max_epochs = as_int();
    else if (key == "train_patience")
        config.algo.trainer.patience = as_int();
    else if (key == "train_batch_size")
        config.algo.trainer.batch_size = as_int();
    else if (key == "max_evaluations")
        config.algo.max_evaluations = as_u64();
    else if (key == "surrogate_pool") {
        config.algo.surrogate_pool.clear();
        for (const std::string& name : split(value, ',')) {
            const std::string f = trim(name);
            if (f == "mlp")
                config.algo.surrogate_pool.push_back(SurrogateFamily::MLP);
            else if (f == "tsfis")
                config.algo.surrogate_pool.push_back(SurrogateFamily::TSFIS);
            else if (f == "svr")
                config.algo.surrogate_pool.push_back(SurrogateFamily::SVR);
            else
                throw std::invalid_argument("config: unknown surrogate family '" + f + "'");
        }
    } else if (key == "optimizer_pool") {
        config.algo.optimizer_pool.clear();
        for (const std::string& name : split(value, ',')) {
            const std::string f = trim(name);
            if (f == "nsga2")
                config.algo.optimizer_pool.push_back(OptimizerFamily::NSGA2);
            else if (f == "moead")
                config.algo.optimizer_pool.push_back(OptimizerFamily::MOEAD);
            else
                throw std::invalid_argument("config: unknown optimizer family '" + f + "'");
        }
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& file, ExperimentConfig base)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open config file " + file.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty())
            continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(base, stripped.substr(0, eq), stripped.substr(eq + 1));
    }
    return base;
}

double ExperimentRecord::final_igd_mean() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.trace.back().igd_archive);
    return mean_of(v);
}

double ExperimentRecord::final_igd_std() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.trace.back().igd_archive);
    return sample_std(v);
}

double ExperimentRecord::c_archive_mean() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.c_archive);
    return mean_of(v);
}

double ExperimentRecord::c_archive_std() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.c_archive);
    return sample_std(v);
}

double ExperimentRecord::c_xf_mean() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.c_xf);
    return mean_of(v);
}

double ExperimentRecord::c_xf_std() const
{
    std::vector<double> v;
    for (const RunResult& r : runs)
        v.push_back(r.c_xf);
    return sample_std(v);
}

std::vector<std::array<double, 3>> ExperimentRecord::iteration_bands() const
{
    const double z = normal_quantile(0.5 * (1.0 + config.confidence));
    std::vector<std::array<double, 3>> bands;
    for (int t = 0; t < config.iterations; ++t) {
        std::vector<double> v;
        for (const RunResult& r : runs)
            v.push_back(r.trace[static_cast<std::size_t>(t)].igd_archive);
        const double half = z * sample_std(v) / std::sqrt(static_cast<double>(v.size()));
        bands.push_back({static_cast<double>(t + 1), mean_of(v), half});
    }
    return bands;
}

namespace {

void dump_models(const ExperimentRecord& record, const std::vector<LandscapeIdentifier>& best_lis)
{
    const std::filesystem::path dir = record.config.output_dir / "models";
    std::filesystem::create_directories(dir);
    for (std::size_t r = 0; r < best_lis.size(); ++r) {
        for (std::size_t j = 0; j < best_lis[r].trained.size(); ++j) {
            const TrainedSurrogate& model = *best_lis[r].trained[j];
            const std::filesystem::path file = dir / ("run" + std::to_string(r) + "_obj" + std::to_string(j) + ".bin");
            std::ofstream out(file, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write model checkpoint " + file.string());
            const std::vector<double>& params = model.parameters();
            out << "# " << model.spec().summary() << " params=" << params.size() << "\n";
            out.write(reinterpret_cast<const char*>(params.data()),
                      static_cast<std::streamsize>(params.size() * sizeof(double)));
        }
    }
}

} // namespace

ExperimentRecord run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const DtlzInstance instance = DtlzInstance::paper(parse_variant_number(config.problem));
    std::filesystem::create_directories(config.output_dir);
    const ReferenceFront front = load_or_generate_front(instance, static_cast<std::size_t>(config.front_size),
                                                        config.front_cache_dir());

    const int total_threads = resolve_thread_count(config.threads);
    const int run_workers = std::max(1, std::min(config.runs, total_threads));
    const int engine_threads = std::max(1, total_threads / run_workers);

    ExperimentRecord record;
    record.config = config;
    record.config.threads = total_threads;
    record.runs.resize(static_cast<std::size_t>(config.runs));
    std::vector<LandscapeIdentifier> best_lis(static_cast<std::size_t>(config.runs));

    parallel_for(static_cast<std::size_t>(config.runs), run_workers, [&](std::size_t r) {
        Problem problem = instance.make_problem();
        PameliConfig algo = config.algo;
        algo.iterations = config.iterations;
        algo.threads = engine_threads;
        algo.reference_front = &front;
        const RngStream rng(config.seed + r);
        PameliOutput out = run_pameli(problem, algo, rng);

        RunResult& result = record.runs[r];
        result.trace = std::move(out.trace);
        result.final_best_li = result.trace.back().best_li;
        ErrorCurve archive_curve, xf_curve;
        for (const IterationRecord& row : result.trace) {
            archive_curve.push_back(row.igd_archive);
            xf_curve.push_back(row.igd_xf);
        }
        result.c_archive = speed_of_convergence(archive_curve);
        result.c_xf = speed_of_convergence(xf_curve);
        best_lis[r] = std::move(out.best_li);
        std::fprintf(stderr, "[pameli] %s run %zu done: evals=%llu final_igd=%.6f best=%s\n",
                     config.problem.c_str(), r,
                     static_cast<unsigned long long>(result.trace.back().budgeted_evals),
                     result.trace.back().igd_archive, result.final_best_li.c_str());
    });

    write_results_csv(record, config.output_dir / "results.csv");
    emit_li_distribution(std::span<const ExperimentRecord>(&record, 1), config.output_dir / "li_distribution.csv");
    emit_convergence_plot(record, config.output_dir / "convergence.svg");
    if (config.dump_models)
        dump_models(record, best_lis);
    return record;
}

void write_results_csv(const ExperimentRecord& record, const std::filesystem::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << CSV_HEADER << "\n";
    for (std::size_t r = 0; r < record.runs.size(); ++r) {
        for (const IterationRecord& row : record.runs[r].trace) {
            out << r << ',' << row.iteration << ',' << row.budgeted_evals << ','
                << fmt(row.igd_archive) << ',' << fmt(row.igd_xf) << ',' << fmt(row.hv_archive) << ','
                << row.best_li << "\n";
        }
    }
    out << "# summary\n";
    out << "# stat,runs," << record.runs.size() << "\n";
    out << "# stat,iterations," << record.config.iterations << "\n";
    out << "# stat,confidence," << fmt(record.config.confidence) << "\n";
    out << "# stat,final_igd_mean," << fmt(record.final_igd_mean()) << "\n";
    out << "# stat,final_igd_std," << fmt(record.final_igd_std()) << "\n";
    out << "# stat,c_archive_mean," << fmt(record.c_archive_mean()) << "\n";
    out << "# stat,c_archive_std," << fmt(record.c_archive_std()) << "\n";
    out << "# stat,c_xf_mean," << fmt(record.c_xf_mean()) << "\n";
    out << "# stat,c_xf_std," << fmt(record.c_xf_std()) << "\n";
    for (std::size_t r = 0; r < record.runs.size(); ++r)
        out << "# run_c," << r << ',' << fmt(record.runs[r].c_archive) << ',' << fmt(record.runs[r].c_xf) << "\n";
    for (const std::array<double, 3>& band : record.iteration_bands())
        out << "# iter_ci," << static_cast<int>(band[0]) << ',' << fmt(band[1]) << ',' << fmt(band[2]) << "\n";
    if (!out)
        throw std::runtime_error("write failed for " + file.string());
}

LoadedResults load_results_csv(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != CSV_HEADER)
        throw std::runtime_error(file.string() + ": unexpected header");

    LoadedResults res;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const std::vector<std::string> f = split(line, ',');
            if (f[0] == "# stat" && f.size() == 3)
                res.stats[f[1]] = std::stod(f[2]);
            else if (f[0] == "# iter_ci" && f.size() == 4)
                res.iteration_bands.push_back({std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
            continue;
        }
        const std::vector<std::string> f = split(line, ',');
        if (f.size() != 7)
            throw std::runtime_error(file.string() + ": row with " + std::to_string(f.size()) + " columns");
        res.rows.push_back(f);
    }
    if (!res.stats.count("runs") || !res.stats.count("iterations"))
        throw std::runtime_error(file.string() + ": missing summary block");
    res.runs = static_cast<int>(res.stats.at("runs"));
    res.iterations = static_cast<int>(res.stats.at("iterations"));
    if (res.rows.size() != static_cast<std::size_t>(res.runs) * static_cast<std::size_t>(res.iterations))
        throw std::runtime_error(file.string() + ": row count does not match runs x iterations");
    if (res.iteration_bands.size() != static_cast<std::size_t>(res.iterations))
        throw std::runtime_error(file.string() + ": iteration band count mismatch");
    return res;
}

namespace {

void render_svg(const std::vector<std::array<double, 3>>& bands, const std::string& title,
                const std::filesystem::path& svg_file)
{
    if (bands.empty())
        throw std::invalid_argument("emit_convergence_plot: empty record");

    const double W = 720, H = 480, L = 80, R = 25, T = 40, B = 60;
    double ymax = 0.0;
    for (const auto& b : bands)
        ymax = std::max(ymax, b[1] + b[2]);
    if (ymax <= 0.0)
        ymax = 1.0;
    ymax *= 1.05;
    const double x0 = bands.front()[0], x1 = bands.back()[0];
    const double xspan = std::max(1.0, x1 - x0);

    auto px = [&](double x) { return L + (x - x0) / xspan * (W - L - R); };
    auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

    std::ofstream out(svg_file);
    if (!out)
        throw std::runtime_error("cannot write " + svg_file.string());
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";

    // confidence band
    out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.55\" stroke=\"none\" points=\"";
    for (const auto& b : bands)
        out << px(b[0]) << ',' << py(std::min(ymax, b[1] + b[2])) << ' ';
    for (auto it = bands.rbegin(); it != bands.rend(); ++it)
        out << px((*it)[0]) << ',' << py(std::max(0.0, (*it)[1] - (*it)[2])) << ' ';
    out << "\"/>\n";

    // mean curve
    out << "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"2\" points=\"";
    for (const auto& b : bands)
        out << px(b[0]) << ',' << py(b[1]) << ' ';
    out << "\"/>\n";

    // axes
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    char buf[32];
    for (const auto& b : bands) {
        out << "<line x1=\"" << px(b[0]) << "\" y1=\"" << H - B << "\" x2=\"" << px(b[0]) << "\" y2=\""
            << H - B + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(b[0]) << "\" y=\"" << H - B + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << static_cast<int>(b[0]) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double y = ymax * i / 5.0;
        std::snprintf(buf, sizeof(buf), "%.3g", y);
        out << "<line x1=\"" << L - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << L << "\" y2=\"" << py(y)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << L - 9 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">iteration</text>\n";
    out << "<text x=\"20\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
        << (T + H - B) / 2 << ")\">IGD</text>\n";
    out << "</svg>\n";
    if (!out)
        throw std::runtime_error("write failed for " + svg_file.string());

    std::filesystem::path dat_file = svg_file;
    dat_file.replace_extension(".dat");
    std::ofstream dat(dat_file);
    if (!dat)
        throw std::runtime_error("cannot write " + dat_file.string());
    for (const auto& b : bands)
        dat << static_cast<int>(b[0]) << ' ' << fmt(b[1]) << ' ' << fmt(b[2]) << "\n";
}

} // namespace

void emit_convergence_plot(const ExperimentRecord& record, const std::filesystem::path& svg_file)
{
    render_svg(record.iteration_bands(), record.config.problem + " / " + to_string(record.config.algo.variant),
               svg_file);
}

void emit_convergence_plot(const LoadedResults& results, const std::string& title,
                           const std::filesystem::path& svg_file)
{
    render_svg(results.iteration_bands, title, svg_file);
}

void emit_li_distribution(std::span<const ExperimentRecord> records, const std::filesystem::path& file)
{
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << "problem,runs,mlp,tsfis,svr,nsga2,moead\n";
    for (const ExperimentRecord& record : records) {
        int mlp = 0, tsfis = 0, svr = 0, nsga2 = 0, moead = 0;
        for (const RunResult& run : record.runs) {
            // genotype strings look like "MLP/TSFIS/SVR+NSGA2"
            const std::vector<std::string> parts = split(run.final_best_li, '+');
            if (parts.size() != 2)
                throw std::runtime_error("malformed genotype '" + run.final_best_li + "'");
            for (const std::string& fam : split(parts[0], '/')) {
                if (fam == "MLP")
                    ++mlp;
                else if (fam == "TSFIS")
                    ++tsfis;
                else if (fam == "SVR")
                    ++svr;
                else
                    throw std::runtime_error("unknown surrogate family '" + fam + "'");
            }
            if (parts[1] == "NSGA2")
                ++nsga2;
            else if (parts[1] == "MOEAD")
                ++moead;
            else
                throw std::runtime_error("unknown optimizer family '" + parts[1] + "'");
        }
        out << record.config.problem << ',' << record.runs.size() << ',' << mlp << ',' << tsfis << ','
            << svr << ',' << nsga2 << ',' << moead << "\n";
    }
    if (!out)
        throw std::runtime_error("write failed for " + file.string());
}

} // namespace pameli
