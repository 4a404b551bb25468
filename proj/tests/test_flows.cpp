#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sns/errors.hpp"
#include "sns/field.hpp"
#include "sns/flows.hpp"
#include "sns/normal.hpp"
#include "sns/oracles.hpp"
#include "sns/rng.hpp"

using namespace sns;

namespace {

double normal_draw(std::uint64_t& state) {
    return inverse_normal_cdf(0.5 + 0.999999 * (splitmix_uniform(state) - 0.5));
}

FlowConfig flow(double nu, double eps, int N) {
    FlowConfig f;
    f.nu = nu;
    f.epsilon = eps;
    f.degree = N;
    return f;
}

}  // namespace

TEST_CASE("euler_rhs closed forms") {
    const SpectralField f10 = basis_field({1, 0}, 4);
    CHECK(sobolev_norm(euler_rhs(f10, flow(0.01, 1.0, 4)), 0.0) <= 1e-14);

    const SpectralField r = euler_rhs(f10, flow(0.01, 0.5, 4));
    CHECK(r(1, 0) == doctest::Approx(-0.005).epsilon(1e-12));
    CHECK(sobolev_norm(r, 0.0) == doctest::Approx(0.005).epsilon(1e-10));

    for (int i = 0; i < 5; ++i) {
        const SpectralField w = oracles::random_field(8, 40 + i);
        const SpectralField rhs = euler_rhs(w, flow(0.01, 1.0, 8));
        const double h1 = sobolev_norm(w, 1.0);
        CHECK(std::abs(l2_inner(rhs, w)) <= 1e-10 * h1 * h1);
    }
}

TEST_CASE("rk4_flow trivial cases") {
    const FlowConfig cfg = flow(0.01, 1.0, 4);
    const SpectralField zero(4);
    CHECK(sobolev_norm(rk4_flow(zero, 1.0, cfg), 0.0) == 0.0);

    const SpectralField f10 = basis_field({1, 0}, 4);
    SpectralField moved = rk4_flow(f10, 1.0, cfg);
    moved -= f10;
    CHECK(sobolev_norm(moved, 0.0) <= 1e-12);

    CHECK_THROWS_AS(rk4_flow(f10, -1.0, cfg), std::invalid_argument);
}

TEST_CASE("rk4_flow matches exact linear decay") {
    // single mode, no nonlinearity: dw/dt = -(1-eps) nu w
    const FlowConfig cfg = flow(0.01, 0.5, 4);
    const SpectralField out = rk4_flow_steps(basis_field({1, 0}, 4), 1.0, 10, cfg);
    CHECK(out(1, 0) == doctest::Approx(std::exp(-0.005)).epsilon(1e-10));
}

TEST_CASE("rk4 is fourth order on the linear part") {
    // decay rate 1: nu = 2, eps = 0.5, |k|^2 = 1
    const FlowConfig cfg = flow(2.0, 0.5, 4);
    const double exact = std::exp(-1.0);
    double err[3];
    int idx = 0;
    for (int steps : {5, 10, 20}) {  // h = 0.2, 0.1, 0.05
        const SpectralField out = rk4_flow_steps(basis_field({1, 0}, 4), 1.0, steps, cfg);
        err[idx++] = std::abs(out(1, 0) - exact);
    }
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    CHECK(r1 > 8.0);
    CHECK(r1 < 32.0);
    CHECK(r2 > 8.0);
    CHECK(r2 < 32.0);
}

TEST_CASE("rk4_flow contracts the L2 norm with eps = 1") {
    const FlowConfig cfg = flow(0.01, 1.0, 12);
    for (int i = 0; i < 5; ++i) {
        const SpectralField w = oracles::random_field(12, 70 + i, 2.0);
        const SpectralField out = rk4_flow(w, 0.5, cfg);
        CHECK(sobolev_norm(out, 0.0) <= sobolev_norm(w, 0.0) * (1.0 + 1e-8));
    }
}

TEST_CASE("ou_params closed forms and limits") {
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}};
    const FlowConfig cfg = flow(0.01, 1.0, 4);

    const OUStepParams p1 = ou_params(1.0, cfg, forcing);
    CHECK(p1.forced[0].sigma * p1.forced[0].sigma ==
          doctest::Approx(0.99006633466223489).epsilon(1e-14));

    // t -> 0: sigma^2 / t -> q^2
    const OUStepParams p0 = ou_params(1e-8, cfg, forcing);
    CHECK(p0.forced[0].sigma * p0.forced[0].sigma / 1e-8 ==
          doctest::Approx(1.0).epsilon(1e-10));

    // t -> infinity: sigma^2 -> q^2 / (2 eps nu |k|^2)
    const OUStepParams pinf = ou_params(1e8, cfg, forcing);
    CHECK(pinf.forced[0].sigma * pinf.forced[0].sigma ==
          doctest::Approx(50.0).epsilon(1e-10));

    // unforced modes decay by exp(-eps nu |k|^2 t)
    CHECK(p1.decay_at({2, 2}) == doctest::Approx(std::exp(-0.08)).epsilon(1e-14));

    CHECK_THROWS_AS(ou_params(0.0, cfg, forcing), std::invalid_argument);
    ForcingConfig outside;
    outside.modes = {{{9, 0}, 1.0}};
    CHECK_THROWS_AS(ou_params(1.0, cfg, outside), std::invalid_argument);
}

TEST_CASE("ou_exact_step: decay, affinity, draw count") {
    const FlowConfig cfg = flow(0.01, 1.0, 6);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{1, 1}, 0.5}};
    const OUStepParams params = ou_params(1.0, cfg, forcing);

    SUBCASE("pure decay at zero draws") {
        const double g[2] = {0.0, 0.0};
        const SpectralField out = ou_exact_step(basis_field({5, 5}, 6), params, g);
        CHECK(out(5, 5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
    }
    SUBCASE("affine in the state, noise counted once") {
        const double g[2] = {0.7, -1.3};
        const SpectralField a = oracles::random_field(6, 1);
        const SpectralField b = oracles::random_field(6, 2);
        SpectralField lhs = ou_exact_step(a + b, params, g);
        SpectralField rhs = ou_exact_step(a, params, g);
        rhs += ou_exact_step(b, params, g);
        rhs -= ou_exact_step(SpectralField(6), params, g);
        lhs -= rhs;
        CHECK(sobolev_norm(lhs, 0.0) <= 1e-12);
    }
    SUBCASE("draw count must match") {
        const double g[1] = {0.0};
        CHECK_THROWS_AS(ou_exact_step(SpectralField(6), params, std::span<const double>(g, 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("ou_exact_step sample variance matches the closed form") {
    const FlowConfig cfg = flow(0.01, 1.0, 2);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}};
    const OUStepParams params = ou_params(1.0, cfg, forcing);
    const SpectralField zero(2);
    std::uint64_t state = 123;
    oracles::Moments mom;
    for (int i = 0; i < 100000; ++i) {
        const double g[1] = {normal_draw(state)};
        mom.add(ou_exact_step(zero, params, g)(1, 0));
    }
    const double sigma2 = params.forced[0].sigma * params.forced[0].sigma;
    CHECK(std::abs(mom.variance() - sigma2) <= 4.0 * mom.stderr_variance());
    CHECK(std::abs(mom.mean) <= 4.0 * mom.stderr_mean());
}

TEST_CASE("half-step composition reproduces the one-step law") {
    const FlowConfig cfg = flow(0.01, 1.0, 4);
    ForcingConfig forcing;
    forcing.modes = {{{1, 1}, 2.0}};
    const double t = 0.8;
    const OUStepParams full = ou_params(t, cfg, forcing);
    const OUStepParams half = ou_params(0.5 * t, cfg, forcing);
    const double lambda = -cfg.epsilon * cfg.nu * 2.0;  // |k|^2 = 2
    const double s_half2 = half.forced[0].sigma * half.forced[0].sigma;
    const double composed = std::exp(2.0 * lambda * 0.5 * t) * s_half2 + s_half2;
    CHECK(composed ==
          doctest::Approx(full.forced[0].sigma * full.forced[0].sigma).epsilon(1e-12));
    CHECK(half.decay_at({1, 1}) * half.decay_at({1, 1}) ==
          doctest::Approx(full.decay_at({1, 1})).epsilon(1e-13));
}

TEST_CASE("ou_psi_expectation closed forms") {
    const FlowConfig cfg = flow(0.01, 1.0, 2);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}};
    const OUStepParams params = ou_params(1.0, cfg, forcing);
    const SpectralField zero(2);

    // eta sigma^2 = 0.25 -> (1 - 0.5)^(-1/2) = sqrt(2)
    const double sigma2 = params.forced[0].sigma * params.forced[0].sigma;
    const double eta = 0.25 / sigma2;
    CHECK(ou_psi_expectation(zero, params, eta) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

    CHECK(ou_psi_expectation(zero, params, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_WITH_AS(ou_psi_expectation(zero, params, 0.51 / sigma2),
                         doctest::Contains("(1,0)"), std::invalid_argument);
}

TEST_CASE("ou_psi_expectation matches Monte Carlo for a nonzero start") {
    const FlowConfig cfg = flow(0.05, 1.0, 2);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{-1, 0}, 0.7}};
    const OUStepParams params = ou_params(0.7, cfg, forcing);
    SpectralField w0(2);
    w0.set(1, 0, 0.9);
    w0.set(1, 1, -0.4);
    const double eta = 0.08;
    const double closed = ou_psi_expectation(w0, params, eta);

    std::uint64_t state = 321;
    oracles::Moments mom;
    std::vector<double> g(2);
    for (int i = 0; i < 200000; ++i) {
        g[0] = normal_draw(state);
        g[1] = normal_draw(state);
        const SpectralField w = ou_exact_step(w0, params, g);
        const double n = sobolev_norm(w, 0.0);
        mom.add(std::exp(eta * n * n));
    }
    CHECK(std::abs(mom.mean - closed) <= 4.0 * mom.stderr_mean());
}

TEST_CASE("empirical supermartingale bound at w0 = 0") {
    const FlowConfig cfg = flow(0.01, 1.0, 2);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{1, 1}, 1.0}, {{-1, -1}, 1.0}};
    const double t = 1.0;
    const OUStepParams params = ou_params(t, cfg, forcing);
    const SpectralField zero(2);
    const double eta = 0.05;
    const double closed = ou_psi_expectation(zero, params, eta);
    const double omega_hat = std::log(closed) / t;

    std::uint64_t state = 777;
    oracles::Moments mom;
    std::vector<double> g(4);
    for (int i = 0; i < 200000; ++i) {
        for (double& x : g) x = normal_draw(state);
        const SpectralField w = ou_exact_step(zero, params, g);
        const double n = sobolev_norm(w, 0.0);
        mom.add(std::exp(eta * n * n));
    }
    CHECK(std::abs(mom.mean - closed) <= 4.0 * mom.stderr_mean());
    // psi(0) = 1: the growth bound exp(omega_hat t) dominates the estimate
    CHECK(mom.mean <= std::exp(omega_hat * t) + 4.0 * mom.stderr_mean());
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(euler_rhs(SpectralField(4), flow(0.01, 0.0, 4)), std::invalid_argument);
    CHECK_THROWS_AS(euler_rhs(SpectralField(4), flow(0.01, 1.5, 4)), std::invalid_argument);
    CHECK_THROWS_AS(euler_rhs(SpectralField(4), flow(-1.0, 1.0, 4)), std::invalid_argument);
}
