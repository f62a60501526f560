#ifndef PAMELI_ENGINE_HPP
#define PAMELI_ENGINE_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pameli/core.hpp"
#include "pameli/optimizers.hpp"
#include "pameli/problems.hpp"
#include "pameli/surrogates.hpp"

namespace pameli {

// The evolving individual: m surrogate genes plus one optimizer gene, with
// the products of the current iteration (trained models, APS, fitness).
struct LandscapeIdentifier {
    std::vector<SurrogateSpec> surrogate_specs;
    OptimizerSpec optimizer_spec;

    std::vector<std::shared_ptr<const TrainedSurrogate>> trained; // one per objective
    std::optional<ApproximatedParetoSet> aps;
    std::optional<double> fitness;

    // Family-only genotype string, e.g. "MLP/TSFIS/SVR+NSGA2".
    std::string genotype_summary() const;
};

struct LiPopulation {
    std::vector<LandscapeIdentifier> members;
    int generation = 0;
};

// Gaussian mixture over the APSs: one component mean per LI, shared sample
// covariance of the pooled solutions (1/|Z| normalization).
struct MixtureModel {
    std::vector<Solution> component_means;
    Solution global_mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd cholesky; // of covariance + jitter * I
    double jitter = 0.0;
};

struct EnsembleParetoSet {
    std::vector<Solution> solutions;
    std::vector<std::size_t> origin; // index of the mixture component used
    std::vector<ObjectiveVector> objectives; // filled once evaluated
};

enum class Variant { Full, Baseline, OME, OMS };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct PameliConfig {
    int li_population = 8;        // n
    int initial_sample = 100;     // |X^0|
    int eps_size = 100;           // |X'|
    int best_li_samples = 100;    // |X_f|
    int iterations = 10;
    Variant variant = Variant::Full;

    double meta_crossover_prob = 1.0;
    double meta_mutation_prob = 0.1;

    std::vector<SurrogateFamily> surrogate_pool{SurrogateFamily::MLP, SurrogateFamily::TSFIS, SurrogateFamily::SVR};
    std::vector<OptimizerFamily> optimizer_pool{OptimizerFamily::NSGA2, OptimizerFamily::MOEAD};
    int optimizer_population = 100;
    int optimizer_generations = 800;

    TrainerOptions trainer{};

    std::uint64_t max_evaluations = 0; // 0 = unbounded
    int threads = 1;

    // instrumentation only; IGD columns are NaN without it
    const ReferenceFront* reference_front = nullptr;
};

struct IterationRecord {
    int iteration = 0;
    std::uint64_t budgeted_evals = 0;
    double igd_archive = 0.0;
    double igd_xf = 0.0;
    double hv_archive = 0.0;
    std::string best_li;
    std::vector<double> li_fitness;
};

struct PameliOutput {
    std::vector<Solution> archive_solutions;
    std::vector<ObjectiveVector> archive_objectives;
    LandscapeIdentifier best_li;
    std::vector<Solution> best_li_samples; // X_f of the final iteration
    std::vector<IterationRecord> trace;
    LiPopulation final_population; // the last evaluated generation
};

// --- stepwise operations -----------------------------------------------

struct InitialState {
    LiPopulation population;
    Dataset dataset;
};

// n LIs with uniformly drawn genes plus the evaluated Latin hypercube sample.
InitialState initialize(Problem& problem, const PameliConfig& config, const RngStream& rng);

// Fits every LI's m surrogates to the full dataset. Per-LI streams derive
// from `base`, so retraining with an unchanged dataset reproduces parameters.
void train_all(LiPopulation& population, const Dataset& dataset, const SearchSpace& space,
               const PameliConfig& config, const RngStream& base);

// Runs each LI's optimizer on its own surrogates; never evaluates the truth.
void identify_all(LiPopulation& population, const SearchSpace& space,
                  const PameliConfig& config, const RngStream& base);

MixtureModel build_mixture(const LiPopulation& population);

// Alg. 2: per slot, a uniform component then a Gaussian draw, clipped to the
// space.
EnsembleParetoSet sample_eps(const MixtureModel& mixture, std::size_t count,
                             const SearchSpace& space, RngStream& rng);

// Exploitative sampling of the baseline/OME variants: uniform LI, then a
// uniform point of its APS.
EnsembleParetoSet sample_eps_direct(const LiPopulation& population, std::size_t count,
                                    const SearchSpace& space, RngStream& rng);

// Budgeted evaluation of the EPS and hypervolume fitness per LI against the
// shared reference point max(F(X')). LIs that received no samples get 0.
void evaluate_eps_and_fitness(EnsembleParetoSet& eps, Problem& problem, LiPopulation& population);

// Elitism + roulette-wheel parents + uniform gene crossover + per-gene
// mutation from the pools.
LiPopulation meta_update(const LiPopulation& population, const PameliConfig& config, RngStream& rng);

// First-iteration best LI: lowest mean approximation error over the dataset,
// ties to the lowest index.
std::size_t select_initial_best(const LiPopulation& population, const Dataset& dataset);

// The full loop (Alg. 1).
PameliOutput run_pameli(Problem& problem, const PameliConfig& config, const RngStream& rng);

} // namespace pameli

#endif
