#include "pameli/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pameli {

bool dominates(const ObjectiveVector& u, const ObjectiveVector& v)
{
    if (u.size() != v.size())
        throw std::invalid_argument("dominates: dimension mismatch (" + std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
    bool strictly_better = false;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] > v[j])
            return false;
        if (u[j] < v[j])
            strictly_better = true;
    }
    return strictly_better;
}

std::vector<std::size_t> nondominated_filter(std::span<const ObjectiveVector> points)
{
    if (points.empty())
        throw std::invalid_argument("nondominated_filter: empty input");

    // A dominator always precedes its victim in lexicographic order, so a
    // single pass over the sorted points only has to test against the
    // survivors seen so far.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a] < points[b];
    });

    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        bool dominated = false;
        for (std::size_t s : kept) {
            if (dominates(points[s], points[idx])) {
                dominated = true;
                break;
            }
        }
        if (!dominated)
            kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

ObjectiveVector reference_point_of(std::span<const ObjectiveVector> points)
{
    if (points.empty())
        throw std::invalid_argument("reference_point_of: empty input");
    ObjectiveVector r = points[0];
    for (const ObjectiveVector& p : points) {
        if (p.size() != r.size())
            throw std::invalid_argument("reference_point_of: dimension mismatch");
        for (std::size_t j = 0; j < r.size(); ++j)
            r[j] = std::max(r[j], p[j]);
    }
    return r;
}

namespace {

void require_within_reference(std::span<const ObjectiveVector> points, const ObjectiveVector& reference)
{
    for (const ObjectiveVector& p : points) {
        if (p.size() != reference.size())
            throw std::invalid_argument("hypervolume: point dimension does not match reference point");
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] > reference[j])
                throw std::domain_error("hypervolume: point exceeds reference point in objective " + std::to_string(j));
        }
    }
}

// Area of the union of rectangles [p, r] in 2-D, via a left-to-right sweep.
double hypervolume_2d(std::vector<std::pair<double, double>> pts, double r1, double r2)
{
    if (pts.empty())
        return 0.0;
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double best_y = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        best_y = std::min(best_y, pts[i].second);
        const double next_x = (i + 1 < pts.size()) ? pts[i + 1].first : r1;
        if (next_x > pts[i].first)
            area += (next_x - pts[i].first) * (r2 - best_y);
    }
    // Dominated prefixes never contribute negative area because best_y <= r2.
    return area;
}

} // namespace

double hypervolume(std::span<const ObjectiveVector> points, const ObjectiveVector& reference)
{
    require_within_reference(points, reference);
    if (points.empty())
        return 0.0;
    const std::size_t m = reference.size();

    if (m == 1) {
        double lo = reference[0];
        for (const ObjectiveVector& p : points)
            lo = std::min(lo, p[0]);
        return reference[0] - lo;
    }

    if (m == 2) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(points.size());
        for (const ObjectiveVector& p : points)
            pts.emplace_back(p[0], p[1]);
        return hypervolume_2d(std::move(pts), reference[0], reference[1]);
    }

    if (m == 3) {
        // Dimension sweep over f3: between consecutive levels the dominated
        // region is a 2-D staircase of the points already passed.
        std::vector<std::size_t> order(points.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[a][2] < points[b][2];
        });

        double volume = 0.0;
        std::vector<std::pair<double, double>> active;
        std::size_t i = 0;
        while (i < order.size()) {
            const double level = points[order[i]][2];
            while (i < order.size() && points[order[i]][2] == level) {
                active.emplace_back(points[order[i]][0], points[order[i]][1]);
                ++i;
            }
            const double next_level = (i < order.size()) ? points[order[i]][2] : reference[2];
            if (next_level > level)
                volume += hypervolume_2d(active, reference[0], reference[1]) * (next_level - level);
        }
        return volume;
    }

    throw std::invalid_argument("hypervolume: exact computation supports m <= 3; use hypervolume_monte_carlo");
}

HypervolumeEstimate hypervolume_monte_carlo(std::span<const ObjectiveVector> points,
                                            const ObjectiveVector& reference,
                                            std::size_t samples, RngStream& rng)
{
    require_within_reference(points, reference);
    if (samples == 0)
        throw std::invalid_argument("hypervolume_monte_carlo: samples must be >= 1");
    if (points.empty())
        return {0.0, 0.0, samples};

    const std::size_t m = reference.size();
    ObjectiveVector lo(m, std::numeric_limits<double>::infinity());
    for (const ObjectiveVector& p : points)
        for (std::size_t j = 0; j < m; ++j)
            lo[j] = std::min(lo[j], p[j]);

    double box = 1.0;
    for (std::size_t j = 0; j < m; ++j)
        box *= reference[j] - lo[j];
    if (box == 0.0)
        return {0.0, 0.0, samples};

    std::size_t hits = 0;
    ObjectiveVector s(m);
    for (std::size_t n = 0; n < samples; ++n) {
        for (std::size_t j = 0; j < m; ++j)
            s[j] = rng.uniform(lo[j], reference[j]);
        for (const ObjectiveVector& p : points) {
            bool covered = true;
            for (std::size_t j = 0; j < m; ++j) {
                if (p[j] > s[j]) {
                    covered = false;
                    break;
                }
            }
            if (covered) {
                ++hits;
                break;
            }
        }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(0.0, frac * (1.0 - frac) / static_cast<double>(samples)));
    return {frac * box, se * box, samples};
}

double igd(std::span<const ObjectiveVector> obtained, std::span<const ObjectiveVector> reference)
{
    if (obtained.empty() || reference.empty())
        throw std::invalid_argument("igd: both sets must be non-empty");
    const std::size_t m = reference[0].size();
    for (const ObjectiveVector& g : obtained)
        if (g.size() != m)
            throw std::invalid_argument("igd: dimension mismatch");

    double sum_sq = 0.0;
    for (const ObjectiveVector& h : reference) {
        double best = std::numeric_limits<double>::infinity();
        for (const ObjectiveVector& g : obtained) {
            double dist = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double diff = h[j] - g[j];
                dist += diff * diff;
            }
            best = std::min(best, dist);
        }
        sum_sq += best;
    }
    return std::sqrt(sum_sq) / static_cast<double>(reference.size());
}

double speed_of_convergence(const ErrorCurve& curve)
{
    if (curve.size() < 2)
        throw std::invalid_argument("speed_of_convergence: needs at least two iterations");
    for (double e : curve)
        if (!(e > 0.0))
            throw std::invalid_argument("speed_of_convergence: error values must be positive");
    double area = 0.0;
    for (std::size_t t = 0; t + 1 < curve.size(); ++t)
        area += 0.5 * (curve[t] + curve[t + 1]);
    return 1.0 / area;
}

} // namespace pameli
