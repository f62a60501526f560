#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "pameli/indicators.hpp"
#include "pameli/problems.hpp"

using namespace pameli;

TEST_CASE("DTLZ hand evaluations")
{
    const DtlzInstance d2 = DtlzInstance::paper(2);
    const ObjectiveVector f2 = d2.evaluate(Solution(12, 0.5));
    CHECK(f2[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(f2[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(f2[2] == doctest::Approx(0.70710678118654752).epsilon(1e-9));

    const DtlzInstance d1 = DtlzInstance::paper(1);
    const ObjectiveVector f1 = d1.evaluate(Solution(7, 0.5));
    CHECK(f1[0] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(f1[1] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(f1[2] == doctest::Approx(0.25).epsilon(1e-9));

    // DTLZ7 with a zeroed distance block and both position variables at 0:
    // g-sum = 0, so f3 = 2 * (3 - 0 - 0) = 6
    const DtlzInstance d7 = DtlzInstance::paper(7);
    const ObjectiveVector f7 = d7.evaluate(Solution(22, 0.0));
    CHECK(f7[0] == doctest::Approx(0.0));
    CHECK(f7[1] == doctest::Approx(0.0));
    CHECK(f7[2] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("DTLZ validates its inputs")
{
    const DtlzInstance d2 = DtlzInstance::paper(2);
    Solution bad(12, 0.5);
    bad[3] = -0.1;
    CHECK_THROWS_AS(d2.evaluate(bad), std::domain_error);
    CHECK_THROWS_AS(d2.evaluate(Solution(11, 0.5)), std::domain_error);
    CHECK_THROWS_AS(DtlzInstance(8, 12, 3), std::invalid_argument);
    CHECK_THROWS_AS(DtlzInstance(2, 2, 3), std::invalid_argument);
}

TEST_CASE("paper dimensions")
{
    CHECK(DtlzInstance::paper(1).d == 7);
    for (int v = 2; v <= 6; ++v)
        CHECK(DtlzInstance::paper(v).d == 12);
    CHECK(DtlzInstance::paper(7).d == 22);
    CHECK(DtlzInstance::paper(4).k() == 10);
}

TEST_CASE("objectives are finite and non-negative across the box")
{
    RngStream rng(7);
    for (int v = 1; v <= 7; ++v) {
        const DtlzInstance inst = DtlzInstance::paper(v);
        for (int i = 0; i < 200; ++i) {
            Solution x(inst.d);
            for (double& c : x)
                c = rng.uniform01();
            for (double f : inst.evaluate(x)) {
                CHECK(std::isfinite(f));
                CHECK(f >= 0.0);
            }
        }
    }
}

TEST_CASE("DTLZ1 reference front with target 3 gives the simplex vertices")
{
    const ReferenceFront f = generate_reference_front(DtlzInstance::paper(1), 3);
    REQUIRE(f.points.size() == 3);
    bool has_apex = false;
    for (const ObjectiveVector& p : f.points) {
        CHECK(p[0] + p[1] + p[2] == doctest::Approx(0.5).epsilon(1e-12));
        has_apex = has_apex || (p == ObjectiveVector{0.5, 0.0, 0.0});
    }
    CHECK(has_apex);
}

TEST_CASE("DTLZ2 reference front lies on the unit sphere")
{
    const ReferenceFront f = generate_reference_front(DtlzInstance::paper(2), 10000);
    CHECK(std::abs(static_cast<double>(f.points.size()) - 10000.0) <= 500.0);
    for (const ObjectiveVector& p : f.points) {
        const double sq = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        CHECK(std::abs(sq - 1.0) < 1e-9);
    }
}

TEST_CASE("reference fronts hit the size target within 5%")
{
    for (int v = 1; v <= 7; ++v) {
        const ReferenceFront f = generate_reference_front(DtlzInstance::paper(v), 2000);
        const double ratio = static_cast<double>(f.points.size()) / 2000.0;
        CHECK(ratio >= 0.95);
        CHECK(ratio <= 1.05);
    }
}

TEST_CASE("reference fronts are mutually non-dominated (200-point subsample)")
{
    RngStream rng(12);
    for (int v = 1; v <= 7; ++v) {
        const ReferenceFront f = generate_reference_front(DtlzInstance::paper(v), 1000);
        std::vector<ObjectiveVector> sample;
        for (int i = 0; i < 200; ++i)
            sample.push_back(f.points[rng.uniform_index(f.points.size())]);
        for (std::size_t a = 0; a < sample.size(); ++a)
            for (std::size_t b = 0; b < sample.size(); ++b)
                if (a != b)
                    CHECK_FALSE(dominates(sample[a], sample[b]));
    }
}

TEST_CASE("front points are never dominated by random evaluations")
{
    RngStream rng(3);
    for (int v = 1; v <= 7; ++v) {
        const DtlzInstance inst = DtlzInstance::paper(v);
        const ReferenceFront front = generate_reference_front(inst, 500);
        std::vector<ObjectiveVector> evals;
        for (int i = 0; i < 1000; ++i) {
            Solution x(inst.d);
            for (double& c : x)
                c = rng.uniform01();
            evals.push_back(inst.evaluate(x));
        }
        for (int i = 0; i < 50; ++i) {
            const ObjectiveVector& p = front.points[rng.uniform_index(front.points.size())];
            for (const ObjectiveVector& e : evals)
                CHECK_FALSE(dominates(e, p));
        }
    }
}

TEST_CASE("solutions at the g-minimizer land on the analytic front")
{
    RngStream rng(9);
    // distance variables at the minimizer of g: 0.5 for DTLZ1-5, 0 for DTLZ6/7
    for (int v : {1, 2, 3, 4, 5, 6, 7}) {
        const DtlzInstance inst = DtlzInstance::paper(v);
        for (int rep = 0; rep < 20; ++rep) {
            Solution x(inst.d, (v >= 6) ? 0.0 : 0.5);
            for (std::size_t j = 0; j < inst.m - 1; ++j)
                x[j] = rng.uniform01();
            const ObjectiveVector f = inst.evaluate(x);
            switch (v) {
            case 1:
                CHECK(f[0] + f[1] + f[2] == doctest::Approx(0.5).epsilon(1e-9));
                break;
            case 2:
            case 3:
            case 4:
            case 5:
            case 6:
                CHECK(f[0] * f[0] + f[1] * f[1] + f[2] * f[2] == doctest::Approx(1.0).epsilon(1e-9));
                break;
            case 7: {
                // h identity: f3 = 6 - sum_i f_i (1 + sin(3 pi f_i))
                const double expect = 6.0 - f[0] * (1.0 + std::sin(3.0 * M_PI * f[0]))
                    - f[1] * (1.0 + std::sin(3.0 * M_PI * f[1]));
                CHECK(f[2] == doctest::Approx(expect).epsilon(1e-9));
                break;
            }
            }
        }
    }
}

TEST_CASE("DTLZ5/6 fronts are the degenerate curve")
{
    for (int v : {5, 6}) {
        const ReferenceFront f = generate_reference_front(DtlzInstance::paper(v), 100);
        REQUIRE(f.points.size() == 100);
        for (const ObjectiveVector& p : f.points) {
            CHECK(p[0] == doctest::Approx(p[1]).epsilon(1e-12));
            CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("reference front cache round-trips")
{
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "pameli_front_test";
    std::filesystem::remove_all(dir);
    const DtlzInstance inst = DtlzInstance::paper(2);

    const ReferenceFront generated = load_or_generate_front(inst, 300, dir);
    const std::filesystem::path file = dir / "dtlz2_m3_n300.txt";
    REQUIRE(std::filesystem::exists(file));

    const ReferenceFront loaded = load_or_generate_front(inst, 300, dir);
    REQUIRE(loaded.points.size() == generated.points.size());
    for (std::size_t i = 0; i < loaded.points.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(loaded.points[i][j] == doctest::Approx(generated.points[i][j]).epsilon(1e-12));

    CHECK_THROWS_AS(load_reference_front(dir / "missing.txt"), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("simplex lattice weights")
{
    const auto w = simplex_lattice_weights(3, 12);
    CHECK(w.size() == 91);
    for (const ObjectiveVector& v : w)
        CHECK(v[0] + v[1] + v[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(simplex_lattice_degree_for(3, 10000) == 140); // C(142,2) = 10011
}
