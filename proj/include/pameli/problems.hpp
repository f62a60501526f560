#ifndef PAMELI_PROBLEMS_HPP
#define PAMELI_PROBLEMS_HPP

#include <cstddef>
#include <filesystem>
#include <vector>

#include "pameli/core.hpp"

namespace pameli {

// One member of the DTLZ suite over [0,1]^d with k = d - m + 1 distance
// variables.
struct DtlzInstance {
    int variant;
    std::size_t d;
    std::size_t m;

    DtlzInstance(int variant, std::size_t d, std::size_t m);

    // Paper parameterization: d = 7 / 12 / 22 for DTLZ1 / DTLZ2-6 / DTLZ7, m = 3.
    static DtlzInstance paper(int variant);

    std::size_t k() const { return d - m + 1; }
    SearchSpace space() const { return SearchSpace::unit_cube(d); }
    std::string name() const;

    ObjectiveVector evaluate(const Solution& x) const;
    Problem make_problem() const;
};

// Sampled analytic Pareto front, used as the IGD reference set.
struct ReferenceFront {
    std::vector<ObjectiveVector> points;
};

// Builds the analytic front: simplex-lattice weights on the DTLZ1 plane and
// the DTLZ2-4 sphere, uniform curve parameter for DTLZ5/6, filtered grid for
// DTLZ7. Result size lands within 5% of target_size.
ReferenceFront generate_reference_front(const DtlzInstance& instance, std::size_t target_size);

// Plain-text cache: header "# dtlzV m=M size=N", then one point per line.
void save_reference_front(const ReferenceFront& front, const DtlzInstance& instance, const std::filesystem::path& file);
ReferenceFront load_reference_front(const std::filesystem::path& file);

// Loads from cache_dir if present, otherwise generates and caches.
ReferenceFront load_or_generate_front(const DtlzInstance& instance, std::size_t target_size,
                                      const std::filesystem::path& cache_dir);

// All compositions of degree H into m non-negative parts, scaled to sum 1
// (Das-Dennis simplex lattice).
std::vector<ObjectiveVector> simplex_lattice_weights(std::size_t m, std::size_t degree);

// Smallest-error lattice degree for a requested point count.
std::size_t simplex_lattice_degree_for(std::size_t m, std::size_t target_size);

} // namespace pameli

#endif
