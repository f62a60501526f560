#include "pameli/engine.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pameli/indicators.hpp"
#include "pameli/parallel.hpp"

namespace pameli {

namespace {

constexpr double NAN_D = std::numeric_limits<double>::quiet_NaN();

// substream tags for one iteration
enum : std::uint64_t { STREAM_GENES = 1, STREAM_LHS = 2, STREAM_ITER_BASE = 100 };
enum : std::uint64_t { ITER_TRAIN = 1, ITER_SOLVE = 2, ITER_EPS = 3, ITER_META = 4, ITER_XF = 5 };

bool uses_mixture_sampling(Variant v)
{
    return v == Variant::Full || v == Variant::OMS;
}

bool uses_meta_update(Variant v)
{
    return v == Variant::Full || v == Variant::OME;
}

} // namespace

int resolve_thread_count(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("PAMELI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string to_string(Variant v)
{
    switch (v) {
    case Variant::Full:
        return "full";
    case Variant::Baseline:
        return "baseline";
    case Variant::OME:
        return "ome";
    case Variant::OMS:
        return "oms";
    }
    return "?";
}

Variant variant_from_string(const std::string& name)
{
    if (name == "full")
        return Variant::Full;
    if (name == "baseline")
        return Variant::Baseline;
    if (name == "ome")
        return Variant::OME;
    if (name == "oms")
        return Variant::OMS;
    throw std::invalid_argument("unknown variant '" + name + "' (full|baseline|ome|oms)");
}

std::string LandscapeIdentifier::genotype_summary() const
{
    std::string s;
    for (std::size_t j = 0; j < surrogate_specs.size(); ++j) {
        if (j)
            s += "/";
        s += to_string(surrogate_specs[j].family);
    }
    s += "+" + optimizer_spec.summary();
    return s;
}

InitialState initialize(Problem& problem, const PameliConfig& config, const RngStream& rng)
{
    if (config.li_population < 1 || config.initial_sample < 1 || config.eps_size < 1)
        throw std::invalid_argument("initialize: population, initial sample and EPS size must be positive");
    if (config.max_evaluations != 0 && static_cast<std::uint64_t>(config.initial_sample) > config.max_evaluations)
        throw std::invalid_argument("initialize: evaluation budget cannot cover the initial sample");

    InitialState state;
    const std::size_t m = problem.objective_count();

    RngStream genes = rng.substream(STREAM_GENES);
    state.population.members.resize(config.li_population);
    for (int i = 0; i < config.li_population; ++i) {
        RngStream g = genes.substream(static_cast<std::uint64_t>(i));
        LandscapeIdentifier& li = state.population.members[static_cast<std::size_t>(i)];
        li.surrogate_specs.reserve(m);
        for (std::size_t j = 0; j < m; ++j)
            li.surrogate_specs.push_back(sample_surrogate_spec(config.surrogate_pool, g));
        li.optimizer_spec = sample_optimizer_spec(config.optimizer_pool, g,
                                                  config.optimizer_population, config.optimizer_generations);
    }

    RngStream lhs = rng.substream(STREAM_LHS);
    const std::vector<Solution> x0 = latin_hypercube_sample(problem.space(), static_cast<std::size_t>(config.initial_sample), lhs);
    const std::vector<ObjectiveVector> f0 = problem.evaluate_budgeted(x0);
    state.dataset.append_batch(x0, f0);
    state.dataset.mark_iteration();
    return state;
}

void train_all(LiPopulation& population, const Dataset& dataset, const SearchSpace& space,
               const PameliConfig& config, const RngStream& base)
{
    if (dataset.size() < 10)
        throw std::invalid_argument("train_all: dataset must hold at least 10 entries");
    const std::size_t n = population.members.size();
    const std::size_t m = population.members.empty() ? 0 : population.members[0].surrogate_specs.size();

    // per-objective target columns
    std::vector<std::vector<double>> targets(m, std::vector<double>(dataset.size()));
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t j = 0; j < m; ++j)
            targets[j][i] = dataset.objectives()[i][j];

    for (LandscapeIdentifier& li : population.members)
        li.trained.assign(m, nullptr);

    parallel_for(n * m, config.threads, [&](std::size_t task) {
        const std::size_t i = task / m;
        const std::size_t j = task % m;
        LandscapeIdentifier& li = population.members[i];
        RngStream stream = base.substream(task);
        try {
            li.trained[j] = train_surrogate(li.surrogate_specs[j], dataset.solutions(), targets[j],
                                            space, stream, config.trainer);
        } catch (const std::exception& e) {
            throw std::runtime_error("training LI " + std::to_string(i) + " objective " + std::to_string(j) + ": " + e.what());
        }
    });
}

void identify_all(LiPopulation& population, const SearchSpace& space,
                  const PameliConfig& config, const RngStream& base)
{
    const std::size_t n = population.members.size();
    for (const LandscapeIdentifier& li : population.members)
        if (li.trained.empty() || std::any_of(li.trained.begin(), li.trained.end(), [](const auto& p) { return !p; }))
            throw std::logic_error("identify_all: population must be trained first");

    parallel_for(n, config.threads, [&](std::size_t i) {
        LandscapeIdentifier& li = population.members[i];
        std::vector<BatchObjective> objectives;
        objectives.reserve(li.trained.size());
        for (const std::shared_ptr<const TrainedSurrogate>& model : li.trained) {
            objectives.push_back([model](std::span<const Solution> xs) { return model->predict_batch(xs); });
        }
        RngStream stream = base.substream(i);
        li.aps = solve_surrogate_mop(li.optimizer_spec, objectives, space, stream);
    });
}

MixtureModel build_mixture(const LiPopulation& population)
{
    const std::size_t n = population.members.size();
    if (n == 0)
        throw std::invalid_argument("build_mixture: empty population");
    for (const LandscapeIdentifier& li : population.members)
        if (!li.aps || li.aps->solutions.empty())
            throw std::invalid_argument("build_mixture: every LI needs a non-empty APS");

    const std::size_t d = population.members[0].aps->solutions[0].size();
    MixtureModel mix;
    mix.component_means.assign(n, Solution(d, 0.0));
    mix.global_mean.assign(d, 0.0);

    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& Z = population.members[i].aps->solutions;
        for (const Solution& z : Z)
            for (std::size_t k = 0; k < d; ++k)
                mix.component_means[i][k] += z[k];
        for (std::size_t k = 0; k < d; ++k)
            mix.component_means[i][k] /= static_cast<double>(Z.size());
        total += Z.size();
    }

    for (std::size_t i = 0; i < n; ++i)
        for (const Solution& z : population.members[i].aps->solutions)
            for (std::size_t k = 0; k < d; ++k)
                mix.global_mean[k] += z[k];
    for (std::size_t k = 0; k < d; ++k)
        mix.global_mean[k] /= static_cast<double>(total);

    mix.covariance = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (const Solution& z : population.members[i].aps->solutions) {
            for (std::size_t k = 0; k < d; ++k)
                centered(k) = z[k] - mix.global_mean[k];
            mix.covariance.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0);
        }
    }
    mix.covariance = mix.covariance.selfadjointView<Eigen::Lower>();
    mix.covariance /= static_cast<double>(total);

    // Cholesky with escalating diagonal jitter for degenerate consensus
    Eigen::MatrixXd work = mix.covariance;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            mix.cholesky = llt.matrixL();
            mix.jitter = jitter;
            return mix;
        }
        if (jitter == 0.0)
            jitter = std::max(1e-8 * mix.covariance.trace() / static_cast<double>(d), 1e-12);
        else
            jitter *= 10.0;
        work = mix.covariance + jitter * Eigen::MatrixXd::Identity(d, d);
    }
    throw std::runtime_error("build_mixture: covariance could not be factorized");
}

EnsembleParetoSet sample_eps(const MixtureModel& mixture, std::size_t count,
                             const SearchSpace& space, RngStream& rng)
{
    if (count == 0)
        throw std::invalid_argument("sample_eps: count must be >= 1");
    const std::size_t n = mixture.component_means.size();
    const std::size_t d = space.dimension();

    EnsembleParetoSet eps;
    eps.solutions.reserve(count);
    eps.origin.reserve(count);
    Eigen::VectorXd z(d);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t i = rng.uniform_index(n);
        for (std::size_t k = 0; k < d; ++k)
            z(k) = rng.normal();
        const Eigen::VectorXd step = mixture.cholesky * z;
        Solution x(d);
        for (std::size_t k = 0; k < d; ++k)
            x[k] = mixture.component_means[i][k] + step(k);
        eps.solutions.push_back(space.clip(std::move(x)));
        eps.origin.push_back(i);
    }
    return eps;
}

EnsembleParetoSet sample_eps_direct(const LiPopulation& population, std::size_t count,
                                    const SearchSpace& space, RngStream& rng)
{
    if (count == 0)
        throw std::invalid_argument("sample_eps_direct: count must be >= 1");
    for (const LandscapeIdentifier& li : population.members)
        if (!li.aps || li.aps->solutions.empty())
            throw std::invalid_argument("sample_eps_direct: every LI needs a non-empty APS");

    EnsembleParetoSet eps;
    eps.solutions.reserve(count);
    eps.origin.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t i = rng.uniform_index(population.members.size());
        const auto& aps = population.members[i].aps->solutions;
        Solution x = aps[rng.uniform_index(aps.size())];
        eps.solutions.push_back(space.clip(std::move(x)));
        eps.origin.push_back(i);
    }
    return eps;
}

void evaluate_eps_and_fitness(EnsembleParetoSet& eps, Problem& problem, LiPopulation& population)
{
    if (eps.solutions.empty())
        throw std::invalid_argument("evaluate_eps_and_fitness: empty EPS");
    eps.objectives = problem.evaluate_budgeted(eps.solutions);

    const ObjectiveVector r = reference_point_of(eps.objectives);
    for (std::size_t i = 0; i < population.members.size(); ++i) {
        std::vector<ObjectiveVector> subset;
        for (std::size_t s = 0; s < eps.origin.size(); ++s)
            if (eps.origin[s] == i)
                subset.push_back(eps.objectives[s]);
        population.members[i].fitness = subset.empty() ? 0.0 : hypervolume(subset, r);
    }
}

namespace {

std::size_t roulette_pick(const std::vector<double>& fitness, double total, RngStream& rng)
{
    if (total <= 0.0)
        return rng.uniform_index(fitness.size());
    double u = rng.uniform01() * total;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        u -= fitness[i];
        if (u <= 0.0)
            return i;
    }
    return fitness.size() - 1;
}

} // namespace

LiPopulation meta_update(const LiPopulation& population, const PameliConfig& config, RngStream& rng)
{
    const std::size_t n = population.members.size();
    if (n == 0)
        throw std::invalid_argument("meta_update: empty population");
    std::vector<double> fitness(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!population.members[i].fitness)
            throw std::logic_error("meta_update: all fitness values must be assigned");
        fitness[i] = *population.members[i].fitness;
    }
    const double total = std::accumulate(fitness.begin(), fitness.end(), 0.0);
    const std::size_t elite = static_cast<std::size_t>(
        std::max_element(fitness.begin(), fitness.end()) - fitness.begin());

    LiPopulation next;
    next.generation = population.generation + 1;
    next.members.reserve(n);
    next.members.push_back(population.members[elite]); // elitism, verbatim copy

    const std::size_t genes = population.members[0].surrogate_specs.size() + 1;
    while (next.members.size() < n) {
        const LandscapeIdentifier& pa = population.members[roulette_pick(fitness, total, rng)];
        const LandscapeIdentifier& pb = population.members[roulette_pick(fitness, total, rng)];

        LandscapeIdentifier child;
        child.surrogate_specs.reserve(genes - 1);
        const bool crossed = rng.bernoulli(config.meta_crossover_prob);
        for (std::size_t gene = 0; gene < genes; ++gene) {
            const LandscapeIdentifier& source = (crossed && rng.bernoulli(0.5)) ? pb : pa;
            if (gene + 1 < genes)
                child.surrogate_specs.push_back(source.surrogate_specs[gene]);
            else
                child.optimizer_spec = source.optimizer_spec;
        }
        for (std::size_t gene = 0; gene < genes; ++gene) {
            if (!rng.bernoulli(config.meta_mutation_prob))
                continue;
            if (gene + 1 < genes)
                child.surrogate_specs[gene] = sample_surrogate_spec(config.surrogate_pool, rng);
            else
                child.optimizer_spec = sample_optimizer_spec(config.optimizer_pool, rng,
                                                             config.optimizer_population,
                                                             config.optimizer_generations);
        }
        next.members.push_back(std::move(child));
    }
    return next;
}

std::size_t select_initial_best(const LiPopulation& population, const Dataset& dataset)
{
    if (population.members.empty())
        throw std::invalid_argument("select_initial_best: empty population");
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < population.members.size(); ++i) {
        const LandscapeIdentifier& li = population.members[i];
        if (li.trained.empty())
            throw std::logic_error("select_initial_best: population must be trained first");
        std::vector<const TrainedSurrogate*> models;
        models.reserve(li.trained.size());
        for (const auto& p : li.trained)
            models.push_back(p.get());
        const double err = approximation_error(models, dataset);
        if (err < best_err) {
            best_err = err;
            best = i;
        }
    }
    return best;
}

PameliOutput run_pameli(Problem& problem, const PameliConfig& config, const RngStream& rng)
{
    if (config.iterations < 1)
        throw std::invalid_argument("run_pameli: iterations must be >= 1");
    const SearchSpace& space = problem.space();
    const ReferenceFront* front = config.reference_front;

    InitialState state = initialize(problem, config, rng);
    LiPopulation& population = state.population;
    Dataset& dataset = state.dataset;

    // fixed hypervolume reference for the archive trace: worst initial image
    const ObjectiveVector hv_reference = reference_point_of(dataset.objectives());

    PameliOutput output;
    std::size_t best_index = 0;

    for (int t = 1; t <= config.iterations; ++t) {
        RngStream iter = rng.substream(STREAM_ITER_BASE + static_cast<std::uint64_t>(t));

        train_all(population, dataset, space, config, iter.substream(ITER_TRAIN));
        identify_all(population, space, config, iter.substream(ITER_SOLVE));

        if (t == 1)
            best_index = select_initial_best(population, dataset);

        const MixtureModel mixture = build_mixture(population);

        RngStream eps_stream = iter.substream(ITER_EPS);
        EnsembleParetoSet eps = uses_mixture_sampling(config.variant)
            ? sample_eps(mixture, static_cast<std::size_t>(config.eps_size), space, eps_stream)
            : sample_eps_direct(population, static_cast<std::size_t>(config.eps_size), space, eps_stream);

        evaluate_eps_and_fitness(eps, problem, population);
        dataset.append_batch(eps.solutions, eps.objectives);
        dataset.mark_iteration();

        if (t > 1) {
            best_index = 0;
            double best_fit = -1.0;
            for (std::size_t i = 0; i < population.members.size(); ++i) {
                if (*population.members[i].fitness > best_fit) {
                    best_fit = *population.members[i].fitness;
                    best_index = i;
                }
            }
        }

        // X_f: instrumented draws around the best LI's component
        RngStream xf_stream = iter.substream(ITER_XF);
        std::vector<Solution> xf;
        xf.reserve(config.best_li_samples);
        {
            Eigen::VectorXd z(space.dimension());
            for (int s = 0; s < config.best_li_samples; ++s) {
                for (std::size_t k = 0; k < space.dimension(); ++k)
                    z(k) = xf_stream.normal();
                const Eigen::VectorXd step = mixture.cholesky * z;
                Solution x(space.dimension());
                for (std::size_t k = 0; k < space.dimension(); ++k)
                    x[k] = mixture.component_means[best_index][k] + step(k);
                xf.push_back(space.clip(std::move(x)));
            }
        }
        const std::vector<ObjectiveVector> xf_objs = problem.evaluate_instrumented(xf);

        // archive of non-dominated dataset entries
        const std::vector<std::size_t> archive = nondominated_filter(dataset.objectives());

        IterationRecord record;
        record.iteration = t;
        record.budgeted_evals = problem.budgeted_evaluations();
        record.best_li = population.members[best_index].genotype_summary();
        record.li_fitness.reserve(population.members.size());
        for (const LandscapeIdentifier& li : population.members)
            record.li_fitness.push_back(*li.fitness);

        std::vector<ObjectiveVector> archive_objs;
        archive_objs.reserve(archive.size());
        for (std::size_t idx : archive)
            archive_objs.push_back(dataset.objectives()[idx]);

        record.igd_archive = front ? igd(archive_objs, front->points) : NAN_D;
        record.igd_xf = front ? igd(xf_objs, front->points) : NAN_D;

        std::vector<ObjectiveVector> bounded;
        for (const ObjectiveVector& f : archive_objs) {
            bool inside = true;
            for (std::size_t j = 0; j < f.size(); ++j)
                if (f[j] > hv_reference[j])
                    inside = false;
            if (inside)
                bounded.push_back(f);
        }
        record.hv_archive = bounded.empty() ? 0.0 : hypervolume(bounded, hv_reference);
        output.trace.push_back(std::move(record));

        if (t == config.iterations) {
            output.best_li = population.members[best_index];
            output.best_li_samples = std::move(xf);
            output.final_population = population;
            output.archive_solutions.reserve(archive.size());
            output.archive_objectives.reserve(archive.size());
            for (std::size_t idx : archive) {
                output.archive_solutions.push_back(dataset.solutions()[idx]);
                output.archive_objectives.push_back(dataset.objectives()[idx]);
            }
        } else if (uses_meta_update(config.variant)) {
            RngStream meta_stream = iter.substream(ITER_META);
            population = meta_update(population, config, meta_stream);
        }
    }
    return output;
}

} // namespace pameli
