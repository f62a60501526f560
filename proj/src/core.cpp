#include "pameli/core.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pameli {

SearchSpace::SearchSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper))
{
    if (lower_.empty() || lower_.size() != upper_.size())
        throw std::invalid_argument("SearchSpace: bounds must be non-empty and of equal dimension");
    for (std::size_t k = 0; k < lower_.size(); ++k) {
        if (!(lower_[k] < upper_[k]))
            throw std::invalid_argument("SearchSpace: lower[" + std::to_string(k) + "] must be < upper[" + std::to_string(k) + "]");
    }
}

SearchSpace SearchSpace::unit_cube(std::size_t dimension)
{
    return SearchSpace(std::vector<double>(dimension, 0.0), std::vector<double>(dimension, 1.0));
}

bool SearchSpace::contains(const Solution& x) const
{
    if (x.size() != dimension())
        return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] >= lower_[k] && x[k] <= upper_[k]))
            return false;
    }
    return true;
}

void SearchSpace::require_inside(const Solution& x) const
{
    if (x.size() != dimension())
        throw std::domain_error("solution has dimension " + std::to_string(x.size()) + ", search space has " + std::to_string(dimension()));
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] >= lower_[k] && x[k] <= upper_[k]))
            throw std::domain_error("coordinate " + std::to_string(k) + " = " + std::to_string(x[k]) + " is outside [" + std::to_string(lower_[k]) + ", " + std::to_string(upper_[k]) + "]");
    }
}

Solution SearchSpace::clip(Solution x) const
{
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < lower_[k])
            x[k] = lower_[k];
        else if (x[k] > upper_[k])
            x[k] = upper_[k];
    }
    return x;
}

Problem::Problem(std::string name, SearchSpace space, std::size_t objective_count, Evaluator evaluator)
    : name_(std::move(name)), space_(std::move(space)), objective_count_(objective_count), evaluator_(std::move(evaluator))
{
    if (objective_count_ == 0)
        throw std::invalid_argument("Problem: objective_count must be positive");
    if (!evaluator_)
        throw std::invalid_argument("Problem: evaluator must be callable");
}

std::vector<ObjectiveVector> Problem::evaluate(std::span<const Solution> batch) const
{
    std::vector<ObjectiveVector> out;
    out.reserve(batch.size());
    for (const Solution& x : batch) {
        space_.require_inside(x);
        ObjectiveVector f = evaluator_(x);
        if (f.size() != objective_count_)
            throw std::runtime_error("problem '" + name_ + "' returned " + std::to_string(f.size()) + " objectives, expected " + std::to_string(objective_count_));
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (!std::isfinite(f[j]))
                throw std::runtime_error("problem '" + name_ + "' produced a non-finite value in objective " + std::to_string(j));
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<ObjectiveVector> Problem::evaluate_budgeted(std::span<const Solution> batch)
{
    std::vector<ObjectiveVector> out = evaluate(batch);
    budgeted_.fetch_add(batch.size());
    return out;
}

std::vector<ObjectiveVector> Problem::evaluate_instrumented(std::span<const Solution> batch)
{
    std::vector<ObjectiveVector> out = evaluate(batch);
    instrumented_.fetch_add(batch.size());
    return out;
}

void Dataset::append(Solution x, ObjectiveVector f)
{
    solutions_.push_back(std::move(x));
    objectives_.push_back(std::move(f));
}

void Dataset::append_batch(std::span<const Solution> xs, std::span<const ObjectiveVector> fs)
{
    if (xs.size() != fs.size())
        throw std::invalid_argument("Dataset::append_batch: size mismatch");
    for (std::size_t i = 0; i < xs.size(); ++i)
        append(xs[i], fs[i]);
}

void Dataset::mark_iteration()
{
    if (!iteration_marks_.empty() && solutions_.size() <= iteration_marks_.back())
        throw std::logic_error("Dataset: iteration marks must grow strictly");
    iteration_marks_.push_back(solutions_.size());
}

std::vector<Solution> latin_hypercube_sample(const SearchSpace& space, std::size_t count, RngStream& rng)
{
    if (count == 0)
        throw std::invalid_argument("latin_hypercube_sample: count must be >= 1");
    const std::size_t d = space.dimension();
    std::vector<Solution> points(count, Solution(d, 0.0));
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<std::size_t> bins = rng.permutation(count);
        const double lo = space.lower()[k];
        const double width = space.upper()[k] - space.lower()[k];
        for (std::size_t i = 0; i < count; ++i) {
            const double u = rng.uniform01();
            points[i][k] = lo + width * (static_cast<double>(bins[i]) + u) * inv;
        }
    }
    return points;
}

} // namespace pameli
