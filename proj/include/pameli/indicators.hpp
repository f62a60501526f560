#ifndef PAMELI_INDICATORS_HPP
#define PAMELI_INDICATORS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "pameli/core.hpp"
#include "pameli/rng.hpp"

namespace pameli {

// Pareto dominance: u <= v componentwise and u != v (minimization).
bool dominates(const ObjectiveVector& u, const ObjectiveVector& v);

// Indices of the points not dominated by any other point, in input order.
std::vector<std::size_t> nondominated_filter(std::span<const ObjectiveVector> points);

// Componentwise maximum; the reference point rule of the LI fitness.
ObjectiveVector reference_point_of(std::span<const ObjectiveVector> points);

// Lebesgue measure of the union of boxes [p, r]. Exact dimension-sweep for
// m <= 3; use hypervolume_monte_carlo for m > 3. Every point must satisfy
// p <= r componentwise (points on the boundary contribute zero volume).
double hypervolume(std::span<const ObjectiveVector> points, const ObjectiveVector& reference);

struct HypervolumeEstimate {
    double value;
    double standard_error;
    std::size_t samples;
};

// Monte-Carlo hypervolume over the bounding box [min(points), r]; works for
// any m and doubles as an independent oracle for the exact sweep.
HypervolumeEstimate hypervolume_monte_carlo(std::span<const ObjectiveVector> points,
                                            const ObjectiveVector& reference,
                                            std::size_t samples, RngStream& rng);

// Inverted generational distance from reference front H to obtained set G:
// (1/|H|) * sqrt(sum_j d_j^2) with d_j the distance from h_j to its nearest
// point of G.
double igd(std::span<const ObjectiveVector> obtained, std::span<const ObjectiveVector> reference);

// Iteration-indexed error values e(1..n), n >= 2, all positive.
using ErrorCurve = std::vector<double>;

// Reciprocal of the trapezoidal integral of the error curve over [1, n].
double speed_of_convergence(const ErrorCurve& curve);

} // namespace pameli

#endif
