#include "pameli/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pameli/indicators.hpp"
#include "pameli/problems.hpp"

namespace pameli {

namespace {

constexpr double INF = std::numeric_limits<double>::infinity();

std::vector<ObjectiveVector> evaluate_batch(std::span<const BatchObjective> objectives,
                                            std::span<const Solution> xs)
{
    std::vector<ObjectiveVector> out(xs.size(), ObjectiveVector(objectives.size()));
    for (std::size_t j = 0; j < objectives.size(); ++j) {
        const std::vector<double> col = objectives[j](xs);
        if (col.size() != xs.size())
            throw std::runtime_error("surrogate objective returned a wrong-sized batch");
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i][j] = col[i];
    }
    return out;
}

std::vector<Solution> random_population(const SearchSpace& space, std::size_t count, RngStream& rng)
{
    std::vector<Solution> pop(count, Solution(space.dimension()));
    for (Solution& x : pop)
        for (std::size_t k = 0; k < x.size(); ++k)
            x[k] = rng.uniform(space.lower()[k], space.upper()[k]);
    return pop;
}

// Simulated binary crossover, eta_c distribution index, per-variable rate 0.5.
void sbx_crossover(Solution& a, Solution& b, const SearchSpace& space, double eta, RngStream& rng)
{
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!rng.bernoulli(0.5))
            continue;
        const double u = rng.uniform01();
        const double beta = (u <= 0.5) ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                       : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
        const double c1 = 0.5 * ((1.0 + beta) * a[k] + (1.0 - beta) * b[k]);
        const double c2 = 0.5 * ((1.0 - beta) * a[k] + (1.0 + beta) * b[k]);
        a[k] = std::clamp(c1, space.lower()[k], space.upper()[k]);
        b[k] = std::clamp(c2, space.lower()[k], space.upper()[k]);
        if (rng.bernoulli(0.5))
            std::swap(a[k], b[k]);
    }
}

// Bounded polynomial mutation, per-variable probability `prob`.
void polynomial_mutation(Solution& x, const SearchSpace& space, double prob, double eta, RngStream& rng)
{
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!rng.bernoulli(prob))
            continue;
        const double lo = space.lower()[k], hi = space.upper()[k];
        const double span = hi - lo;
        const double d1 = (x[k] - lo) / span;
        const double d2 = (hi - x[k]) / span;
        const double u = rng.uniform01();
        double dq;
        if (u < 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, 1.0 / (eta + 1.0)) - 1.0;
        } else {
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, 1.0 / (eta + 1.0));
        }
        x[k] = std::clamp(x[k] + dq * span, lo, hi);
    }
}

struct RankedPopulation {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

RankedPopulation rank_population(std::span<const ObjectiveVector> objs)
{
    RankedPopulation rp;
    rp.rank.assign(objs.size(), 0);
    rp.crowding.assign(objs.size(), 0.0);
    const auto fronts = fast_nondominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        const std::vector<double> cd = crowding_distance(objs, fronts[f]);
        for (std::size_t i = 0; i < fronts[f].size(); ++i) {
            rp.rank[fronts[f][i]] = f;
            rp.crowding[fronts[f][i]] = cd[i];
        }
    }
    return rp;
}

std::size_t binary_tournament(const RankedPopulation& rp, RngStream& rng)
{
    const std::size_t a = rng.uniform_index(rp.rank.size());
    const std::size_t b = rng.uniform_index(rp.rank.size());
    if (rp.rank[a] != rp.rank[b])
        return rp.rank[a] < rp.rank[b] ? a : b;
    if (rp.crowding[a] != rp.crowding[b])
        return rp.crowding[a] > rp.crowding[b] ? a : b;
    return a;
}

// Keep at most `limit` points of the front, preferring high crowding.
std::vector<std::size_t> truncate_by_crowding(std::span<const ObjectiveVector> objs,
                                              std::vector<std::size_t> front, std::size_t limit)
{
    if (front.size() <= limit)
        return front;
    const std::vector<double> cd = crowding_distance(objs, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    std::vector<std::size_t> kept;
    kept.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i)
        kept.push_back(front[order[i]]);
    std::sort(kept.begin(), kept.end());
    return kept;
}

ApproximatedParetoSet extract_aps(std::vector<Solution>& pop, std::vector<ObjectiveVector>& objs,
                                  std::size_t limit)
{
    std::vector<std::size_t> front = nondominated_filter(objs);
    front = truncate_by_crowding(objs, std::move(front), limit);
    ApproximatedParetoSet aps;
    aps.solutions.reserve(front.size());
    aps.objectives.reserve(front.size());
    for (std::size_t idx : front) {
        aps.solutions.push_back(std::move(pop[idx]));
        aps.objectives.push_back(std::move(objs[idx]));
    }
    return aps;
}

ApproximatedParetoSet run_nsga2(const Nsga2Params& p, std::span<const BatchObjective> objectives,
                                const SearchSpace& space, RngStream& rng, const GenerationObserver& observer)
{
    const std::size_t N = static_cast<std::size_t>(p.population);
    std::vector<Solution> pop = random_population(space, N, rng);
    std::vector<ObjectiveVector> objs = evaluate_batch(objectives, pop);
    if (observer)
        observer(0, objs, {});

    for (int gen = 1; gen <= p.generations; ++gen) {
        const RankedPopulation rp = rank_population(objs);

        std::vector<Solution> offspring;
        offspring.reserve(N);
        while (offspring.size() < N) {
            Solution a = pop[binary_tournament(rp, rng)];
            Solution b = pop[binary_tournament(rp, rng)];
            if (rng.bernoulli(p.crossover_prob))
                sbx_crossover(a, b, space, p.sbx_eta, rng);
            polynomial_mutation(a, space, p.mutation_prob, p.mutation_eta, rng);
            offspring.push_back(std::move(a));
            if (offspring.size() < N) {
                polynomial_mutation(b, space, p.mutation_prob, p.mutation_eta, rng);
                offspring.push_back(std::move(b));
            }
        }
        std::vector<ObjectiveVector> off_objs = evaluate_batch(objectives, offspring);

        // (mu + lambda) environmental selection
        std::vector<Solution> united = std::move(pop);
        united.insert(united.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
        std::vector<ObjectiveVector> united_objs = std::move(objs);
        united_objs.insert(united_objs.end(), std::make_move_iterator(off_objs.begin()), std::make_move_iterator(off_objs.end()));

        const auto fronts = fast_nondominated_sort(united_objs);
        pop.clear();
        objs.clear();
        pop.reserve(N);
        objs.reserve(N);
        for (const std::vector<std::size_t>& front : fronts) {
            if (pop.size() == N)
                break;
            std::vector<std::size_t> take = front;
            if (pop.size() + take.size() > N)
                take = truncate_by_crowding(united_objs, std::move(take), N - pop.size());
            for (std::size_t idx : take) {
                pop.push_back(united[idx]);
                objs.push_back(united_objs[idx]);
            }
        }
        if (observer)
            observer(gen, objs, {});
    }
    return extract_aps(pop, objs, 100);
}

ApproximatedParetoSet run_moead(const MoeadParams& p, std::span<const BatchObjective> objectives,
                                const SearchSpace& space, RngStream& rng, const GenerationObserver& observer)
{
    const std::size_t m = objectives.size();

    // Largest simplex lattice that fits the population budget; for m = 3 and
    // a budget of 100 this is degree 12 with 91 weight vectors.
    std::size_t degree = 1;
    {
        auto lattice_size = [m](std::size_t h) {
            double c = 1.0;
            for (std::size_t i = 1; i < m; ++i)
                c *= static_cast<double>(h + i) / static_cast<double>(i);
            return c;
        };
        while (lattice_size(degree + 1) <= static_cast<double>(p.population))
            ++degree;
    }
    const std::vector<ObjectiveVector> weights = simplex_lattice_weights(m, degree);
    const std::size_t N = weights.size();

    // T nearest weight vectors per subproblem (includes itself)
    if (N < 4)
        throw std::invalid_argument("run_moead: population budget too small for DE variation");
    const std::size_t T = std::min<std::size_t>(std::max(4, p.neighborhood), N);
    std::vector<std::vector<std::size_t>> neighbors(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<std::size_t> order(N);
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> dist(N, 0.0);
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < m; ++k)
                dist[j] += (weights[i][k] - weights[j][k]) * (weights[i][k] - weights[j][k]);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
        neighbors[i].assign(order.begin(), order.begin() + T);
    }

    std::vector<Solution> pop = random_population(space, N, rng);
    std::vector<ObjectiveVector> objs = evaluate_batch(objectives, pop);
    ObjectiveVector ideal = objs[0];
    for (const ObjectiveVector& f : objs)
        for (std::size_t k = 0; k < m; ++k)
            ideal[k] = std::min(ideal[k], f[k]);
    if (observer)
        observer(0, objs, ideal);

    const double pm = 1.0 / static_cast<double>(space.dimension());
    std::vector<Solution> offspring(N);

    for (int gen = 1; gen <= p.generations; ++gen) {
        // DE/rand/1 + binomial crossover + polynomial mutation, all offspring
        // produced against the current generation, then evaluated as a batch
        for (std::size_t i = 0; i < N; ++i) {
            const std::vector<std::size_t>& B = neighbors[i];
            std::size_t r1, r2, r3;
            do
                r1 = B[rng.uniform_index(B.size())];
            while (r1 == i);
            do
                r2 = B[rng.uniform_index(B.size())];
            while (r2 == i || r2 == r1);
            do
                r3 = B[rng.uniform_index(B.size())];
            while (r3 == i || r3 == r1 || r3 == r2);

            Solution y = pop[i];
            const std::size_t jrand = rng.uniform_index(space.dimension());
            for (std::size_t k = 0; k < space.dimension(); ++k) {
                if (k == jrand || rng.bernoulli(p.crossover_rate))
                    y[k] = pop[r1][k] + p.de_weight * (pop[r2][k] - pop[r3][k]);
                y[k] = std::clamp(y[k], space.lower()[k], space.upper()[k]);
            }
            polynomial_mutation(y, space, pm, p.mutation_eta, rng);
            offspring[i] = std::move(y);
        }
        const std::vector<ObjectiveVector> off_objs = evaluate_batch(objectives, offspring);

        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < m; ++k)
                ideal[k] = std::min(ideal[k], off_objs[i][k]);
            std::vector<std::size_t> order = neighbors[i];
            rng.shuffle(order);
            int replaced = 0;
            for (std::size_t j : order) {
                if (replaced >= p.replacement_cap)
                    break;
                const double g_new = tchebycheff_aggregate(off_objs[i], weights[j], ideal);
                const double g_old = tchebycheff_aggregate(objs[j], weights[j], ideal);
                if (g_new <= g_old) {
                    pop[j] = offspring[i];
                    objs[j] = off_objs[i];
                    ++replaced;
                }
            }
        }
        if (observer)
            observer(gen, objs, ideal);
    }
    return extract_aps(pop, objs, 100);
}

} // namespace

std::string to_string(OptimizerFamily family)
{
    return family == OptimizerFamily::NSGA2 ? "NSGA2" : "MOEAD";
}

std::string OptimizerSpec::summary() const
{
    return to_string(family);
}

ApproximatedParetoSet solve_surrogate_mop(const OptimizerSpec& spec,
                                          std::span<const BatchObjective> objectives,
                                          const SearchSpace& space, RngStream& rng,
                                          const GenerationObserver& observer)
{
    if (objectives.size() < 2)
        throw std::invalid_argument("solve_surrogate_mop: needs m >= 2 objectives");
    if (spec.family == OptimizerFamily::NSGA2)
        return run_nsga2(spec.nsga2, objectives, space, rng, observer);
    return run_moead(spec.moead, objectives, space, rng, observer);
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const ObjectiveVector> points)
{
    if (points.empty())
        throw std::invalid_argument("fast_nondominated_sort: empty input");
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(points[j], points[i])) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0)
            current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated_by[i])
                if (--domination_count[j] == 0)
                    next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> points,
                                      std::span<const std::size_t> front)
{
    const std::size_t n = front.size();
    std::vector<double> cd(n, 0.0);
    if (n == 0)
        return cd;
    if (n <= 2) {
        std::fill(cd.begin(), cd.end(), INF);
        return cd;
    }
    const std::size_t m = points[front[0]].size();
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < m; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[front[a]][j] < points[front[b]][j];
        });
        cd[order.front()] = INF;
        cd[order.back()] = INF;
        const double span = points[front[order.back()]][j] - points[front[order.front()]][j];
        if (span <= 0.0)
            continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (cd[order[i]] == INF)
                continue;
            cd[order[i]] += (points[front[order[i + 1]]][j] - points[front[order[i - 1]]][j]) / span;
        }
    }
    return cd;
}

double tchebycheff_aggregate(const ObjectiveVector& f, std::span<const double> weight,
                             const ObjectiveVector& ideal)
{
    if (f.size() != weight.size() || f.size() != ideal.size())
        throw std::invalid_argument("tchebycheff_aggregate: dimension mismatch");
    bool any_positive = false;
    double value = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (weight[j] < 0.0)
            throw std::invalid_argument("tchebycheff_aggregate: negative weight");
        any_positive = any_positive || weight[j] > 0.0;
        value = std::max(value, weight[j] * std::abs(f[j] - ideal[j]));
    }
    if (!any_positive)
        throw std::invalid_argument("tchebycheff_aggregate: all-zero weight");
    return value;
}

OptimizerSpec sample_optimizer_spec(std::span<const OptimizerFamily> pool, RngStream& rng,
                                    int population, int generations)
{
    if (pool.empty())
        throw std::invalid_argument("sample_optimizer_spec: empty pool");
    OptimizerSpec spec;
    spec.family = pool[rng.uniform_index(pool.size())];
    spec.nsga2.population = population;
    spec.nsga2.generations = generations;
    spec.moead.population = population;
    spec.moead.generations = generations;
    return spec;
}

} // namespace pameli
