#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pameli/core.hpp"
#include "pameli/problems.hpp"

using namespace pameli;

TEST_CASE("RngStream reproducibility and independence")
{
    RngStream a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next_u64() == b.next_u64());
    bool differs = false;
    for (int i = 0; i < 100; ++i)
        differs |= (b.next_u64() != c.next_u64());
    CHECK(differs);

    RngStream s1 = RngStream(1, 2).substream(3);
    RngStream s2 = RngStream(1, 2).substream(3);
    CHECK(s1.uniform01() == s2.uniform01());
}

TEST_CASE("RngStream draw ranges")
{
    RngStream rng(123);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.uniform_index(7) < 7);
    }
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("SearchSpace validation and membership")
{
    CHECK_THROWS_AS(SearchSpace({0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SearchSpace({}, {}), std::invalid_argument);
    const SearchSpace s = SearchSpace::unit_cube(3);
    CHECK(s.contains({0.0, 0.5, 1.0}));
    CHECK_FALSE(s.contains({0.0, 0.5, 1.5}));
    CHECK_THROWS_WITH_AS(s.require_inside({0.0, 0.5, 1.5}),
                         doctest::Contains("coordinate 2"), std::domain_error);
    const Solution clipped = s.clip({-1.0, 0.5, 2.0});
    CHECK(clipped == Solution{0.0, 0.5, 1.0});
}

TEST_CASE("budgeted evaluation of DTLZ2 and DTLZ1 midpoints")
{
    Problem p2 = DtlzInstance::paper(2).make_problem();
    const std::vector<Solution> batch{Solution(12, 0.5)};
    const auto out = p2.evaluate_budgeted(batch);
    REQUIRE(out.size() == 1);
    CHECK(out[0][0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(out[0][1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(out[0][2] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(std::abs(out[0][2] - 0.70711) < 1e-5);
    CHECK(p2.budgeted_evaluations() == 1);

    Problem p1 = DtlzInstance::paper(1).make_problem();
    const auto out1 = p1.evaluate_budgeted(std::vector<Solution>{Solution(7, 0.5)});
    CHECK(out1[0][0] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(out1[0][1] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(out1[0][2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(out1[0][0] + out1[0][1] + out1[0][2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("empty batch leaves the budget untouched")
{
    Problem p = DtlzInstance::paper(2).make_problem();
    const auto out = p.evaluate_budgeted(std::vector<Solution>{});
    CHECK(out.empty());
    CHECK(p.budgeted_evaluations() == 0);
}

TEST_CASE("instrumented evaluations do not distort the budget")
{
    Problem p = DtlzInstance::paper(2).make_problem();
    const std::vector<Solution> one{Solution(12, 0.5)};
    const auto budgeted = p.evaluate_budgeted(one);
    const auto instrumented = p.evaluate_instrumented(one);
    CHECK(budgeted == instrumented);
    CHECK(p.budgeted_evaluations() == 1);
    CHECK(p.instrumented_evaluations() == 1);

    std::vector<Solution> hundred(100, Solution(12, 0.25));
    p.evaluate_instrumented(hundred);
    CHECK(p.instrumented_evaluations() == 101);
    CHECK(p.budgeted_evaluations() == 1);

    // interleaved calls keep the ledgers separate
    p.evaluate_budgeted(one);
    p.evaluate_instrumented(one);
    p.evaluate_budgeted(one);
    CHECK(p.budgeted_evaluations() == 3);
    CHECK(p.instrumented_evaluations() == 102);
}

TEST_CASE("out-of-bounds solutions name the violating coordinate")
{
    Problem p = DtlzInstance::paper(2).make_problem();
    Solution bad(12, 0.5);
    bad[4] = 1.5;
    CHECK_THROWS_WITH_AS(p.evaluate_budgeted(std::vector<Solution>{bad}),
                         doctest::Contains("coordinate 4"), std::domain_error);
}

TEST_CASE("non-finite objective values abort the run")
{
    Problem p("broken", SearchSpace::unit_cube(1), 1,
              [](const Solution&) { return ObjectiveVector{std::nan("")}; });
    CHECK_THROWS_AS(p.evaluate_budgeted(std::vector<Solution>{Solution{0.5}}), std::runtime_error);
}

TEST_CASE("repeated evaluation is bitwise identical")
{
    Problem p = DtlzInstance::paper(3).make_problem();
    RngStream rng(5);
    Solution x(12);
    for (double& v : x)
        v = rng.uniform01();
    const auto a = p.evaluate_budgeted(std::vector<Solution>{x});
    const auto b = p.evaluate_budgeted(std::vector<Solution>{x});
    CHECK(a[0] == b[0]);
}

TEST_CASE("latin hypercube sampling fills every axis bin exactly once")
{
    const SearchSpace space = SearchSpace::unit_cube(12);
    RngStream rng(42);
    const std::size_t count = 100;
    const auto points = latin_hypercube_sample(space, count, rng);
    REQUIRE(points.size() == count);
    for (std::size_t k = 0; k < 12; ++k) {
        std::set<std::size_t> bins;
        for (const Solution& x : points) {
            CHECK(x[k] >= 0.0);
            CHECK(x[k] <= 1.0);
            bins.insert(static_cast<std::size_t>(std::min(x[k] * count, static_cast<double>(count - 1))));
        }
        CHECK(bins.size() == count); // one sample per width-0.01 bin
    }
}

TEST_CASE("latin hypercube corner cases")
{
    const SearchSpace space({-2.0, 1.0}, {2.0, 3.0});
    RngStream rng(1);
    const auto single = latin_hypercube_sample(space, 1, rng);
    REQUIRE(single.size() == 1);
    CHECK(space.contains(single[0]));

    RngStream r1(9), r2(9);
    CHECK(latin_hypercube_sample(space, 17, r1) == latin_hypercube_sample(space, 17, r2));

    CHECK_THROWS_AS(latin_hypercube_sample(space, 0, rng), std::invalid_argument);
}

TEST_CASE("dataset grows incrementally and marks iterations")
{
    Dataset d;
    CHECK(d.empty());
    d.append({0.1}, {1.0});
    d.append({0.2}, {2.0});
    d.mark_iteration();
    CHECK(d.size() == 2);
    d.append_batch(std::vector<Solution>{{0.3}, {0.4}}, std::vector<ObjectiveVector>{{3.0}, {4.0}});
    d.mark_iteration();
    CHECK(d.iteration_marks() == std::vector<std::size_t>{2, 4});
    CHECK_THROWS_AS(d.mark_iteration(), std::logic_error); // no growth since last mark
    CHECK_THROWS_AS(d.append_batch(std::vector<Solution>{{0.5}}, std::vector<ObjectiveVector>{}),
                    std::invalid_argument);
}
