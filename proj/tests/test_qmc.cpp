#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sns/draws.hpp"
#include "sns/harness.hpp"
#include "sns/normal.hpp"
#include "sns/oracles.hpp"
#include "sns/sobol.hpp"

using namespace sns;

namespace {
const std::string kDirections = default_direction_file();
}

TEST_CASE("sobol: first points") {
    const SobolStream s(8, kDirections);
    const std::vector<double> p0 = s.point(0);
    for (double v : p0) CHECK(v == 0.0);
    const std::vector<double> p1 = s.point(1);
    for (double v : p1) CHECK(v == 0.5);

    // dimension 1 is the van der Corput sequence in Gray-code order
    const SobolStream s1(1, kDirections);
    const double a = s1.point(2)[0];
    const double b = s1.point(3)[0];
    CHECK(std::min(a, b) == 0.25);
    CHECK(std::max(a, b) == 0.75);
}

TEST_CASE("sobol: published low-dimensional values") {
    const SobolStream s(2, kDirections);
    const double expect[5][2] = {
        {0.5, 0.5}, {0.75, 0.25}, {0.25, 0.75}, {0.375, 0.375}, {0.875, 0.875}};
    for (int i = 1; i <= 5; ++i) {
        const std::vector<double> p = s.point(static_cast<std::uint64_t>(i));
        CHECK(p[0] == expect[i - 1][0]);
        CHECK(p[1] == expect[i - 1][1]);
    }
}

TEST_CASE("sobol: bit-exact against the sequential reference generator") {
    const int D = 32;
    const SobolStream s(D, kDirections);
    oracles::ReferenceSobol ref(D, kDirections);
    std::vector<double> mine(D);
    for (int i = 0; i < 512; ++i) {
        const std::vector<double> expect = ref.next();
        s.point(static_cast<std::uint64_t>(i), mine);
        for (int j = 0; j < D; ++j) CHECK(mine[j] == expect[j]);
    }
}

TEST_CASE("sobol: coordinates stay in [0,1) and streams are stateless") {
    const SobolStream a(16, kDirections);
    const SobolStream b(16, kDirections);
    for (std::uint64_t i : {1ull, 77ull, 4095ull, 65536ull}) {
        const auto pa = a.point(i);
        const auto pb = b.point(i);
        for (int j = 0; j < 16; ++j) {
            CHECK(pa[j] == pb[j]);
            CHECK(pa[j] >= 0.0);
            CHECK(pa[j] < 1.0);
        }
    }
    SobolStream seq(4, kDirections);
    CHECK(seq.next() == seq.point(0));
    CHECK(seq.next() == seq.point(1));
}

TEST_CASE("sobol: dimension beyond the table is rejected") {
    CHECK_THROWS_AS(SobolStream(5000, kDirections), std::invalid_argument);
    CHECK_THROWS_AS(SobolStream(2, "/nonexistent/file"), std::runtime_error);
}

TEST_CASE("sobol: dyadic squares of side 1/32 are filled uniformly") {
    const SobolStream s(2, kDirections);
    std::vector<int> counts(32 * 32, 0);
    std::vector<double> p(2);
    for (int i = 0; i < 1024; ++i) {
        s.point(static_cast<std::uint64_t>(i), p);
        const int a = std::min(31, static_cast<int>(p[0] * 32.0));
        const int b = std::min(31, static_cast<int>(p[1] * 32.0));
        ++counts[a * 32 + b];
    }
    int good = 0;
    for (int c : counts)
        if (std::abs(c - 1) <= 1) ++good;
    CHECK(good >= static_cast<int>(0.95 * 1024));
}

TEST_CASE("inverse_normal_cdf: values and symmetry") {
    CHECK(inverse_normal_cdf(0.5) == 0.0);
    // high-precision references
    CHECK(std::abs(inverse_normal_cdf(0.975) - 1.9599639845400542) < 1e-9);
    CHECK(std::abs(inverse_normal_cdf(0.8) - 0.84162123357291420) < 1e-9);
    CHECK(std::abs(inverse_normal_cdf(1e-9) - (-5.9978070150076869)) < 1e-7);

    for (double u : {0.501, 0.6, 0.75, 0.9, 0.99, 0.999999, 1e-6, 0.02425, 0.024251}) {
        CHECK(std::abs(inverse_normal_cdf(1.0 - u) + inverse_normal_cdf(u)) <= 1e-12);
    }
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
    CHECK_THROWS_AS(inverse_normal_cdf(-0.1), std::invalid_argument);
}

TEST_CASE("path_draws: layout, determinism, zero-point skip") {
    const int n = 3, d = 2;
    const SobolStream stream(n * d + 1, kDirections);
    const PathDraws a = path_draws(stream, 5, n, d);
    const PathDraws b = path_draws(stream, 5, n, d);
    CHECK(a.normals == b.normals);
    CHECK(a.bernoulli == b.bernoulli);

    const std::vector<double> u = stream.point(6);
    CHECK(a.bernoulli == (u[n * d] >= 0.5 ? 1 : 0));

    SUBCASE("increment construction maps coordinate s*d+j to step s") {
        const PathDraws inc = path_draws(stream, 5, n, d, DrawConstruction::increments);
        for (int s = 0; s < n; ++s)
            for (int j = 0; j < d; ++j)
                CHECK(inc.normals[s * d + j] == inverse_normal_cdf(u[s * d + j]));
    }
    SUBCASE("bridge construction: coordinate j drives the channel endpoint") {
        // sum of unit-grid increments telescopes to W(n) = sqrt(n) z_j
        for (int j = 0; j < d; ++j) {
            double endpoint = 0.0;
            for (int s = 0; s < n; ++s) endpoint += a.normals[s * d + j];
            CHECK(endpoint ==
                  doctest::Approx(std::sqrt(3.0) * inverse_normal_cdf(u[j])).epsilon(1e-13));
        }
    }
    SUBCASE("bridge at n = 1 equals the increment construction") {
        const SobolStream one(d + 1, kDirections);
        const PathDraws bridge1 = path_draws(one, 9, 1, d, DrawConstruction::bridge);
        const PathDraws inc1 = path_draws(one, 9, 1, d, DrawConstruction::increments);
        CHECK(bridge1.normals == inc1.normals);
    }

    const SobolStream wrong(4, kDirections);
    CHECK_THROWS_AS(path_draws(wrong, 0, n, d), std::invalid_argument);
}

TEST_CASE("path_draws: empirical moments over 2^16 paths") {
    const int n = 2, d = 2;
    const SobolStream stream(n * d + 1, kDirections);
    const int K = 65536;
    std::vector<oracles::Moments> mom(n * d);
    oracles::Moments bern;
    for (int k = 0; k < K; ++k) {
        const PathDraws p = path_draws(stream, static_cast<std::uint64_t>(k), n, d);
        for (int i = 0; i < n * d; ++i) mom[i].add(p.normals[i]);
        bern.add(static_cast<double>(p.bernoulli));
    }
    for (int i = 0; i < n * d; ++i) {
        CHECK(std::abs(mom[i].mean) <= 3.0 * mom[i].stderr_mean());
        CHECK(std::abs(mom[i].variance() - 1.0) <= 3.0 * mom[i].stderr_variance());
    }
    CHECK(std::abs(bern.mean - 0.5) <= 3.0 * bern.stderr_mean());
}
