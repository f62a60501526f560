#ifndef PAMELI_CORE_HPP
#define PAMELI_CORE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pameli/rng.hpp"

namespace pameli {

// A point in the search space / its image in objective space. Kept as plain
// vectors of doubles; the surrounding types carry the semantics.
using Solution = std::vector<double>;
using ObjectiveVector = std::vector<double>;

// Box-bounded d-dimensional search space.
class SearchSpace {
public:
    SearchSpace(std::vector<double> lower, std::vector<double> upper);

    static SearchSpace unit_cube(std::size_t dimension);

    std::size_t dimension() const { return lower_.size(); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }

    bool contains(const Solution& x) const;
    // Throws std::domain_error naming the first violating coordinate.
    void require_inside(const Solution& x) const;
    Solution clip(Solution x) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// An m-objective black box over a box-bounded search space. Evaluations are
// counted on two independent ledgers: budgeted (the real budget of Eq. 1)
// and instrumented (measurement-only, never charged to the budget).
// Evaluators must be pure; counter updates are atomic so evaluators may be
// called from several threads at once.
class Problem {
public:
    using Evaluator = std::function<ObjectiveVector(const Solution&)>;

    Problem(std::string name, SearchSpace space, std::size_t objective_count, Evaluator evaluator);

    const std::string& name() const { return name_; }
    const SearchSpace& space() const { return space_; }
    std::size_t objective_count() const { return objective_count_; }

    std::vector<ObjectiveVector> evaluate_budgeted(std::span<const Solution> batch);
    std::vector<ObjectiveVector> evaluate_instrumented(std::span<const Solution> batch);

    std::uint64_t budgeted_evaluations() const { return budgeted_.load(); }
    std::uint64_t instrumented_evaluations() const { return instrumented_.load(); }

private:
    std::vector<ObjectiveVector> evaluate(std::span<const Solution> batch) const;

    std::string name_;
    SearchSpace space_;
    std::size_t objective_count_;
    Evaluator evaluator_;
    std::atomic<std::uint64_t> budgeted_{0};
    std::atomic<std::uint64_t> instrumented_{0};
};

// Incremental archive of evaluated solutions. Entries are never removed;
// mark_iteration() records the entry count l_t at the end of iteration t.
// Single writer (the engine loop); readers may take const references.
class Dataset {
public:
    void append(Solution x, ObjectiveVector f);
    void append_batch(std::span<const Solution> xs, std::span<const ObjectiveVector> fs);
    void mark_iteration();

    std::size_t size() const { return solutions_.size(); }
    bool empty() const { return solutions_.empty(); }
    const std::vector<Solution>& solutions() const { return solutions_; }
    const std::vector<ObjectiveVector>& objectives() const { return objectives_; }
    const std::vector<std::size_t>& iteration_marks() const { return iteration_marks_; }

private:
    std::vector<Solution> solutions_;
    std::vector<ObjectiveVector> objectives_;
    std::vector<std::size_t> iteration_marks_;
};

// Latin hypercube sample: count points, one per equal-width bin on every axis.
std::vector<Solution> latin_hypercube_sample(const SearchSpace& space, std::size_t count, RngStream& rng);

} // namespace pameli

#endif
