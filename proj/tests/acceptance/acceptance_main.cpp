// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code 0 only if all pass.
//
//   pameli_acceptance [--only 2,3,8] [--out DIR]
//
// Experiment-backed criteria share results: the DTLZ2 experiment feeds both
// the budget identity and the reproduction check.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pameli/engine.hpp"
#include "pameli/harness.hpp"
#include "pameli/indicators.hpp"
#include "pameli/optimizers.hpp"
#include "pameli/surrogates.hpp"

using namespace pameli;

namespace {

struct Outcome {
    int criterion;
    bool pass;
    std::string detail;
};

std::filesystem::path g_out = std::filesystem::temp_directory_path() / "pameli_acceptance";

double now_seconds()
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Context {
    std::map<std::string, ExperimentRecord> experiments;

    const ExperimentRecord& experiment(const std::string& name, const std::string& problem, Variant variant,
                                       int runs, int iterations, std::uint64_t seed)
    {
        auto it = experiments.find(name);
        if (it != experiments.end())
            return it->second;
        ExperimentConfig config;
        config.problem = problem;
        config.algo.variant = variant;
        config.runs = runs;
        config.iterations = iterations;
        config.algo.iterations = iterations;
        config.seed = seed;
        config.output_dir = g_out / name;
        config.front_cache = g_out / "fronts";
        std::filesystem::remove_all(config.output_dir);
        std::fprintf(stderr, "[acceptance] running %s: %s %s %d runs x %d iterations...\n", name.c_str(),
                     problem.c_str(), to_string(variant).c_str(), runs, iterations);
        const double t0 = now_seconds();
        ExperimentRecord record = run_experiment(config);
        std::fprintf(stderr, "[acceptance] %s finished in %.1f s (final IGD mean %.6f)\n", name.c_str(),
                     now_seconds() - t0, record.final_igd_mean());
        return experiments.emplace(name, std::move(record)).first->second;
    }
};

std::string fmt_detail(const char* format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------- 1
Outcome criterion_budget_identity(Context& ctx)
{
    const ExperimentRecord& rec = ctx.experiment("dtlz2_full", "dtlz2", Variant::Full, 5, 10, 42);
    bool ok = true;
    std::uint64_t seen = 0;
    for (const RunResult& run : rec.runs) {
        seen = run.trace.back().budgeted_evals;
        ok = ok && (seen == 1100);
        for (std::size_t t = 0; t < run.trace.size(); ++t)
            ok = ok && (run.trace[t].budgeted_evals == 100 + 100 * (t + 1));
    }
    return {1, ok, fmt_detail("paper-default runs use exactly 100 + 10x100 = 1100 budgeted evaluations (saw %llu)",
                              static_cast<unsigned long long>(seen))};
}

// ---------------------------------------------------------------------- 2-4
Outcome criterion_reproduction(Context& ctx, int criterion, const std::string& name, const std::string& problem,
                               double threshold)
{
    const ExperimentRecord& rec = ctx.experiment(name, problem, Variant::Full, 5, 10, 42);
    const double mean = rec.final_igd_mean();
    return {criterion, mean <= threshold,
            fmt_detail("%s mean final archive IGD %.6f (threshold %.2f, 5 runs x 10 iterations)",
                       problem.c_str(), mean, threshold)};
}

// ---------------------------------------------------------------------- 5
Outcome criterion_nonconvergence(Context& ctx)
{
    bool ok = true;
    double worst = 1e300;
    for (const char* problem : {"dtlz1", "dtlz3"}) {
        const ExperimentRecord& rec =
            ctx.experiment(std::string(problem) + "_full", problem, Variant::Full, 2, 10, 42);
        for (const RunResult& run : rec.runs) {
            const double final_igd = run.trace.back().igd_archive;
            worst = std::min(worst, final_igd);
            ok = ok && (final_igd > 1.0);
        }
    }
    return {5, ok, fmt_detail("dtlz1/dtlz3 complete and stay unconverged, min final IGD %.3f > 1.0", worst)};
}

// ---------------------------------------------------------------------- 6
Outcome criterion_hv_oracle()
{
    RngStream rng(2025);
    double worst_rel = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<ObjectiveVector> pts(20, ObjectiveVector(3));
        for (auto& p : pts)
            for (double& v : p)
                v = rng.uniform01();
        const ObjectiveVector r{1.1, 1.1, 1.1};
        const double exact = hypervolume(pts, r);
        RngStream mc_rng = rng.substream(1000 + static_cast<std::uint64_t>(rep));
        const HypervolumeEstimate mc = hypervolume_monte_carlo(pts, r, 1000000, mc_rng);
        worst_rel = std::max(worst_rel, std::abs(mc.value - exact) / exact);
    }
    return {6, worst_rel < 0.01,
            fmt_detail("exact sweep vs 1e6-sample Monte Carlo on 50 random 20-point sets, worst relative gap %.5f",
                       worst_rel)};
}

// ---------------------------------------------------------------------- 7
Outcome criterion_filter_equivalence()
{
    RngStream rng(7);
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
        const std::size_t n = 1 + rng.uniform_index(500);
        const std::size_t m = 2 + rng.uniform_index(2);
        std::vector<ObjectiveVector> pts(n, ObjectiveVector(m));
        for (auto& p : pts)
            for (double& v : p)
                v = (rng.uniform_index(4) == 0) ? static_cast<double>(rng.uniform_index(4)) : rng.uniform01();
        std::vector<std::size_t> brute;
        for (std::size_t i = 0; i < n; ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j)
                dominated = (j != i) && dominates(pts[j], pts[i]);
            if (!dominated)
                brute.push_back(i);
        }
        ok = nondominated_filter(pts) == brute;
    }
    return {7, ok, "non-dominated filter agrees exactly with brute force on 100 random sets up to n = 500"};
}

// ---------------------------------------------------------------------- 8
Outcome criterion_igd_hand_values()
{
    const std::vector<ObjectiveVector> front{{0, 0}, {1, 1}};
    const double a = igd(front, front);
    const double b = igd(std::vector<ObjectiveVector>{{0, 0}}, std::vector<ObjectiveVector>{{3, 4}});
    const double c = igd(std::vector<ObjectiveVector>{{0, 0}}, front);
    const bool ok = std::abs(a) <= 1e-9 && std::abs(b - 5.0) <= 1e-9
        && std::abs(c - 0.70710678118654752) <= 1e-9;
    return {8, ok, fmt_detail("IGD hand cases: %.12f, %.12f, %.12f", a, b, c)};
}

// ---------------------------------------------------------------------- 9
Outcome criterion_c_hand_values()
{
    const double c1 = speed_of_convergence(ErrorCurve(10, 1.0));
    const double c2 = speed_of_convergence(ErrorCurve{1.0, 2.0, 3.0});
    const bool ok = std::abs(c1 - 1.0 / 9.0) <= 1e-12 && std::abs(c2 - 0.25) <= 1e-12;
    return {9, ok, fmt_detail("trapezoid hand cases: %.15f, %.15f", c1, c2)};
}

// ---------------------------------------------------------------------- 10
Outcome criterion_gradient_checks()
{
    RngStream rng(10);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const bool mlp = rep < 10;
        const std::size_t d = 1 + rng.uniform_index(3);
        std::unique_ptr<DifferentiableCore> core;
        if (mlp)
            core = std::make_unique<MlpCore>(d, 1 + static_cast<int>(rng.uniform_index(2)),
                                             2 + static_cast<int>(rng.uniform_index(2)));
        else
            core = std::make_unique<TsfisCore>(d, 2 + static_cast<int>(rng.uniform_index(2)));
        std::vector<double> theta;
        core->initialize(theta, rng);
        for (double& p : theta)
            p += rng.uniform(-0.3, 0.3);
        Eigen::MatrixXd X(6, d);
        Eigen::VectorXd y(6);
        for (int i = 0; i < 6; ++i) {
            for (std::size_t k = 0; k < d; ++k)
                X(i, k) = rng.uniform01();
            y(i) = rng.uniform(0.0, 2.0);
        }
        std::vector<double> grad, scratch;
        core->loss_and_gradient(theta, X, y, grad);
        double num = 0.0, da = 0.0, db = 0.0;
        for (std::size_t p = 0; p < theta.size(); ++p) {
            const double h = 1e-5, keep = theta[p];
            theta[p] = keep + h;
            const double up = core->loss_and_gradient(theta, X, y, scratch);
            theta[p] = keep - h;
            const double down = core->loss_and_gradient(theta, X, y, scratch);
            theta[p] = keep;
            const double fd = (up - down) / (2.0 * h);
            num += (grad[p] - fd) * (grad[p] - fd);
            da += grad[p] * grad[p];
            db += fd * fd;
        }
        worst = std::max(worst, std::sqrt(num) / std::max({std::sqrt(da), std::sqrt(db), 1e-12}));
    }
    return {10, worst < 1e-4,
            fmt_detail("MLP/TSFIS analytic vs central-difference gradients on 20 instances, worst relative error %.2e",
                       worst)};
}

// ---------------------------------------------------------------------- 11
Outcome criterion_mixture_hand_case()
{
    LiPopulation pop;
    auto add = [&](double a, double b) {
        LandscapeIdentifier li;
        ApproximatedParetoSet aps;
        aps.solutions = {{a, b}};
        aps.objectives = {{0.0, 0.0}};
        li.aps = std::move(aps);
        pop.members.push_back(std::move(li));
    };
    add(0.0, 0.0);
    add(2.0, 2.0);
    const MixtureModel mix = build_mixture(pop);
    const bool ok = mix.component_means[0] == Solution{0.0, 0.0}
        && mix.component_means[1] == Solution{2.0, 2.0}
        && mix.global_mean == Solution{1.0, 1.0}
        && mix.covariance(0, 0) == 1.0 && mix.covariance(0, 1) == 1.0
        && mix.covariance(1, 0) == 1.0 && mix.covariance(1, 1) == 1.0;
    return {11, ok, "two-point mixture statistics reproduce mu_1, mu_2, mu and Sigma exactly"};
}

// ---------------------------------------------------------------------- 12
Outcome criterion_meta_ga()
{
    PameliConfig config;
    config.surrogate_pool = {SurrogateFamily::MLP, SurrogateFamily::TSFIS, SurrogateFamily::SVR};
    RngStream rng(12);

    // elitism across 100 random fitness vectors
    bool elitism_ok = true;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.uniform_index(7);
        LiPopulation pop;
        double best_fit = -1.0;
        std::string best_geno;
        for (std::size_t i = 0; i < n; ++i) {
            LandscapeIdentifier li;
            for (int j = 0; j < 3; ++j)
                li.surrogate_specs.push_back(sample_surrogate_spec(config.surrogate_pool, rng));
            li.optimizer_spec = sample_optimizer_spec(config.optimizer_pool, rng);
            li.fitness = rng.uniform01();
            if (*li.fitness > best_fit) {
                best_fit = *li.fitness;
                best_geno = li.genotype_summary();
            }
            pop.members.push_back(std::move(li));
        }
        const LiPopulation next = meta_update(pop, config, rng);
        elitism_ok = elitism_ok && next.members[0].genotype_summary() == best_geno
            && *next.members[0].fitness == best_fit;
    }

    // roulette share of a 0.75-share individual over 1e4 draws
    LiPopulation pair;
    for (int i = 0; i < 2; ++i) {
        LandscapeIdentifier li;
        for (int j = 0; j < 3; ++j)
            li.surrogate_specs.push_back(sample_surrogate_spec(config.surrogate_pool, rng));
        li.optimizer_spec.family = (i == 0) ? OptimizerFamily::NSGA2 : OptimizerFamily::MOEAD;
        li.fitness = (i == 0) ? 3.0 : 1.0;
        pair.members.push_back(std::move(li));
    }
    PameliConfig no_mutation = config;
    no_mutation.meta_mutation_prob = 0.0;
    int from_a = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const LiPopulation next = meta_update(pair, no_mutation, rng);
        from_a += next.members[1].optimizer_spec.family == OptimizerFamily::NSGA2 ? 1 : 0;
    }
    const double share = from_a / static_cast<double>(trials);
    const double sigma = std::sqrt(0.75 * 0.25 / trials);
    const bool roulette_ok = share >= 0.75 - 3.0 * sigma && share <= 0.75 + 3.0 * sigma;

    return {12, elitism_ok && roulette_ok,
            fmt_detail("elitism preserved on 100 random fitness vectors; roulette share %.4f in 0.75 +- %.4f",
                       share, 3.0 * sigma)};
}

// ---------------------------------------------------------------------- 13
Outcome criterion_variant_smoke(Context& ctx)
{
    bool ok = true;
    double full_c = 0.0;
    for (Variant variant : {Variant::Baseline, Variant::OME, Variant::OMS, Variant::Full}) {
        const std::string name = "dtlz2_variant_" + to_string(variant);
        const ExperimentRecord& rec = ctx.experiment(name, "dtlz2", variant, 2, 5, 7);
        try {
            const LoadedResults loaded = load_results_csv(g_out / name / "results.csv");
            ok = ok && loaded.rows.size() == 10 && loaded.runs == 2 && loaded.iterations == 5;
        } catch (const std::exception&) {
            ok = false;
        }
        if (variant == Variant::Full)
            full_c = rec.c_archive_mean();
    }
    return {13, ok,
            fmt_detail("baseline/ome/oms/full complete 2x5 on dtlz2 with valid CSVs; full mean C(archive) = %.4f",
                       full_c)};
}

// ---------------------------------------------------------------------- 14
Outcome criterion_determinism()
{
    ExperimentConfig config;
    config.problem = "dtlz2";
    config.runs = 2;
    config.iterations = 2;
    config.algo.iterations = 2;
    config.seed = 99;
    config.front_size = 1000;
    config.front_cache = g_out / "fronts";
    config.threads = 2;
    config.algo.initial_sample = 30;
    config.algo.eps_size = 20;
    config.algo.best_li_samples = 10;
    config.algo.li_population = 4;
    config.algo.optimizer_generations = 100;

    auto body = [&](const std::filesystem::path& dir) {
        config.output_dir = dir;
        std::filesystem::remove_all(dir);
        run_experiment(config);
        std::ifstream in(dir / "results.csv", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = body(g_out / "determinism_a");
    const std::string b = body(g_out / "determinism_b");
    return {14, !a.empty() && a == b,
            fmt_detail("two invocations with identical config+seed emit bitwise-identical CSV bodies (%zu bytes)",
                       a.size())};
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ','))
                only.insert(std::stoi(tok));
        } else if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
            g_out = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--only 1,2,...] [--out DIR]\n", argv[0]);
            return 2;
        }
    }
    std::filesystem::create_directories(g_out);

    Context ctx;
    std::vector<Outcome> outcomes;
    auto want = [&](int c) { return only.empty() || only.count(c) > 0; };

    // cheap checks first, experiment-backed criteria afterwards
    if (want(6))
        outcomes.push_back(criterion_hv_oracle());
    if (want(7))
        outcomes.push_back(criterion_filter_equivalence());
    if (want(8))
        outcomes.push_back(criterion_igd_hand_values());
    if (want(9))
        outcomes.push_back(criterion_c_hand_values());
    if (want(10))
        outcomes.push_back(criterion_gradient_checks());
    if (want(11))
        outcomes.push_back(criterion_mixture_hand_case());
    if (want(12))
        outcomes.push_back(criterion_meta_ga());
    if (want(14))
        outcomes.push_back(criterion_determinism());
    if (want(13))
        outcomes.push_back(criterion_variant_smoke(ctx));
    if (want(5))
        outcomes.push_back(criterion_nonconvergence(ctx));
    if (want(1))
        outcomes.push_back(criterion_budget_identity(ctx));
    if (want(2))
        outcomes.push_back(criterion_reproduction(ctx, 2, "dtlz2_full", "dtlz2", 0.13));
    if (want(3))
        outcomes.push_back(criterion_reproduction(ctx, 3, "dtlz5_full", "dtlz5", 0.08));
    if (want(4))
        outcomes.push_back(criterion_reproduction(ctx, 4, "dtlz7_full", "dtlz7", 0.30));

    std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) {
        return a.criterion < b.criterion;
    });
    int failures = 0;
    for (const Outcome& o : outcomes) {
        std::printf("%s  criterion %2d: %s\n", o.pass ? "PASS" : "FAIL", o.criterion, o.detail.c_str());
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(outcomes.size()) - failures,
                outcomes.size());
    return failures == 0 ? 0 : 1;
}
