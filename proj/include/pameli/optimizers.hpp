#ifndef PAMELI_OPTIMIZERS_HPP
#define PAMELI_OPTIMIZERS_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pameli/core.hpp"
#include "pameli/rng.hpp"

namespace pameli {

enum class OptimizerFamily { NSGA2, MOEAD };

std::string to_string(OptimizerFamily family);

struct Nsga2Params {
    int population = 100;
    int generations = 800;
    double crossover_prob = 0.95;
    double mutation_prob = 0.01; // per variable
    double sbx_eta = 20.0;
    double mutation_eta = 20.0;
};

struct MoeadParams {
    int population = 100;   // sized down to the nearest simplex lattice
    int generations = 800;
    int neighborhood = 20;
    double crossover_rate = 0.95; // DE binomial CR
    double de_weight = 0.5;       // DE F
    double mutation_eta = 20.0;
    int replacement_cap = 2;
};

struct OptimizerSpec {
    OptimizerFamily family = OptimizerFamily::NSGA2;
    Nsga2Params nsga2{};
    MoeadParams moead{};

    std::string summary() const;
};

// One surrogate objective, evaluated on a whole batch at once.
using BatchObjective = std::function<std::vector<double>(std::span<const Solution>)>;

// Called once after initialization (generation 0) and once per generation
// with the current population's objective values. MOEA/D also reports its
// ideal-point estimate; NSGA-II passes an empty vector.
using GenerationObserver =
    std::function<void(int generation, std::span<const ObjectiveVector>, const ObjectiveVector& ideal)>;

struct ApproximatedParetoSet {
    std::vector<Solution> solutions;
    std::vector<ObjectiveVector> objectives; // surrogate values, same order
};

// Runs the spec'd optimizer against the surrogate objectives and returns the
// non-dominated subset of the final population (at most 100 solutions, by
// crowding distance). Never touches a true objective.
ApproximatedParetoSet solve_surrogate_mop(const OptimizerSpec& spec,
                                          std::span<const BatchObjective> objectives,
                                          const SearchSpace& space, RngStream& rng,
                                          const GenerationObserver& observer = {});

// Deb's fast non-dominated sorting; front 0 is the non-dominated set and
// every member of front k is dominated by someone in front k-1.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> points);

// Crowding distances of the points listed in `front` (boundary points get
// infinity).
std::vector<double> crowding_distance(std::span<const ObjectiveVector> points,
                                      std::span<const std::size_t> front);

// max_j w_j |f_j - z_j|
double tchebycheff_aggregate(const ObjectiveVector& f, std::span<const double> weight,
                             const ObjectiveVector& ideal);

// Uniform family draw; parameters fixed to the given population/generation
// budget (defaults per the experimental setup).
OptimizerSpec sample_optimizer_spec(std::span<const OptimizerFamily> pool, RngStream& rng,
                                    int population = 100, int generations = 800);

} // namespace pameli

#endif
