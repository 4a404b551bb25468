#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "sns/draws.hpp"
#include "sns/field.hpp"
#include "sns/flows.hpp"
#include "sns/harness.hpp"
#include "sns/normal.hpp"
#include "sns/oracles.hpp"
#include "sns/rng.hpp"
#include "sns/sobol.hpp"
#include "sns/splitting.hpp"

using namespace sns;

namespace {

FlowConfig flow(double nu, double eps, int N) {
    FlowConfig f;
    f.nu = nu;
    f.epsilon = eps;
    f.degree = N;
    return f;
}

ForcingConfig no_forcing(int d = 1) {
    ForcingConfig f;
    for (int j = 0; j < d; ++j) f.modes.push_back({{1 + j, 0}, 0.0});
    return f;
}

double norm_diff(const SpectralField& a, const SpectralField& b) {
    SpectralField d = a;
    d -= b;
    return sobolev_norm(d, 0.0);
}

// 2x2 matrices for the linear splitting oracle
using Mat = std::array<double, 4>;
Mat mul(const Mat& a, const Mat& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}
Mat expm(const Mat& a) {  // scaling-free series, fine for small entries
    Mat r{1, 0, 0, 1};
    Mat term{1, 0, 0, 1};
    for (int k = 1; k <= 20; ++k) {
        term = mul(term, a);
        for (double& v : term) v /= k;
        for (int i = 0; i < 4; ++i) r[i] += term[i];
    }
    return r;
}
double frob(const Mat& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

}  // namespace

TEST_CASE("strang step: stationary when both flows are trivial") {
    // zero viscosity: the Euler flow fixes a single mode and the OU flow
    // is pure (zero-amplitude) noise
    const FlowConfig cfg = flow(0.0, 1.0, 4);
    const ForcingConfig forcing = no_forcing();
    const SpectralField w0 = basis_field({1, 0}, 4);
    const double g[1] = {1.7};  // sigma = 0, so the draw is inert
    const SpectralField w1 = strang_path_step(w0, 0.25, g, cfg, forcing);
    CHECK(norm_diff(w1, w0) <= 1e-12);
}

TEST_CASE("strang step: third-order local error against the unsplit flow") {
    // forcing 0, eps = 0.5: split = rk4(dt/2) o heat-decay(dt) o rk4(dt/2);
    // reference = finely resolved RK4 of the full drift nu lap + B
    // (realized as epsilon = 0.5 with doubled viscosity).
    const int N = 6;
    const double nu = 0.05;
    const FlowConfig split_cfg = flow(nu, 0.5, N);
    const FlowConfig full_cfg = flow(2.0 * nu, 0.5, N);
    const ForcingConfig forcing = no_forcing();
    const SpectralField w0 = oracles::random_field(N, 99, 3.0);
    const double g[1] = {0.0};

    auto local_error = [&](double dt) {
        const SpectralField split = strang_path_step(w0, dt, g, split_cfg, forcing);
        const SpectralField exact = rk4_flow_steps(w0, dt, 512, full_cfg);
        return norm_diff(split, exact);
    };
    const double e1 = local_error(0.05);
    const double e2 = local_error(0.025);
    CHECK(e1 / e2 > 6.0);
    CHECK(e1 / e2 < 10.5);
}

TEST_CASE("strang step: pure additive noise in the zero-viscosity limit") {
    const FlowConfig cfg = flow(0.0, 1.0, 4);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 0.8}};
    const double dt = 0.3;
    const OUStepParams params = ou_params(dt, cfg, forcing);
    CHECK(params.forced[0].sigma * params.forced[0].sigma ==
          doctest::Approx(0.64 * dt).epsilon(1e-14));

    const SpectralField zero(4);
    std::uint64_t state = 4242;
    oracles::Moments mom;
    for (int i = 0; i < 50000; ++i) {
        const double g[1] = {inverse_normal_cdf(0.5 + 0.999999 * (splitmix_uniform(state) - 0.5))};
        const SpectralField w = strang_path_step(zero, dt, g, cfg, forcing);
        mom.add(w(1, 0));
    }
    CHECK(std::abs(mom.mean) <= 4.0 * mom.stderr_mean());
    CHECK(std::abs(mom.variance() - params.forced[0].sigma * params.forced[0].sigma) <=
          4.0 * mom.stderr_variance());
}

TEST_CASE("lie step: trivial case and second-order local defect") {
    const FlowConfig cfg = flow(0.0, 1.0, 4);
    const ForcingConfig forcing = no_forcing();
    const SpectralField w0 = basis_field({1, 0}, 4);
    const double g[1] = {0.4};
    CHECK(norm_diff(lie_path_step(w0, 0.25, g, cfg, forcing), w0) <= 1e-12);

    // two half Lie steps differ from one full step at O(dt^2)
    const int N = 6;
    const FlowConfig split_cfg = flow(0.2, 0.5, N);
    const SpectralField w = oracles::random_field(N, 7, 3.0);
    auto defect = [&](double dt) {
        const SpectralField one = lie_path_step(w, dt, g, split_cfg, forcing);
        SpectralField two = lie_path_step(w, 0.5 * dt, g, split_cfg, forcing);
        two = lie_path_step(two, 0.5 * dt, g, split_cfg, forcing);
        return norm_diff(one, two);
    };
    const double e1 = defect(0.4);
    const double e2 = defect(0.2);
    CHECK(e1 / e2 > 2.6);
    CHECK(e1 / e2 < 6.0);
}

TEST_CASE("swss: averaging the two orderings is Strang-accurate on a linear system") {
    // A = skew advection surrogate, B = diagonal decay; the swss average
    // 1/2(e^A e^B + e^B e^A) and Strang e^{A/2} e^B e^{A/2} agree to O(h^3).
    auto scaled = [](const Mat& m, double h) {
        Mat r = m;
        for (double& v : r) v *= h;
        return r;
    };
    const Mat A{0.0, 1.0, -1.0, 0.0};
    const Mat B{-0.3, 0.0, 0.0, -0.7};
    auto gap = [&](double h) {
        const Mat ab = mul(expm(scaled(A, h)), expm(scaled(B, h)));
        const Mat ba = mul(expm(scaled(B, h)), expm(scaled(A, h)));
        Mat avg;
        for (int i = 0; i < 4; ++i) avg[i] = 0.5 * (ab[i] + ba[i]);
        const Mat strang =
            mul(mul(expm(scaled(A, 0.5 * h)), expm(scaled(B, h))), expm(scaled(A, 0.5 * h)));
        Mat d;
        for (int i = 0; i < 4; ++i) d[i] = avg[i] - strang[i];
        return frob(d);
    };
    const double g1 = gap(0.2);
    const double g2 = gap(0.1);
    CHECK(g1 / g2 > 5.0);
    CHECK(g1 / g2 < 13.0);
}

TEST_CASE("swss trajectory: ordering draw matters, zero draws are stationary") {
    const FlowConfig cfg = flow(0.01, 1.0, 4);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{1, 1}, 1.0}, {{-1, -1}, 1.0}};

    PathDraws draws;
    draws.steps = 4;
    draws.dim = 4;
    draws.normals.assign(16, 0.0);
    std::uint64_t state = 31337;
    for (double& x : draws.normals) x = 2.0 * splitmix_uniform(state) - 1.0;

    SchemeSpec spec;
    spec.kind = SchemeKind::swss;
    spec.steps = 4;
    spec.horizon = 1.0;
    const SpectralField w0 = oracles::random_field(4, 5, 0.5);

    spec.ordering_draw = 0;
    const SpectralField end0 = swss_trajectory(w0, spec, draws, cfg, forcing);
    spec.ordering_draw = 1;
    const SpectralField end1 = swss_trajectory(w0, spec, draws, cfg, forcing);
    CHECK(norm_diff(end0, end1) > 1e-8);  // noncommutativity witness

    // bit-identical reruns
    const SpectralField again = swss_trajectory(w0, spec, draws, cfg, forcing);
    for (std::size_t i = 0; i < again.raw().size(); ++i)
        CHECK(again.raw()[i] == end1.raw()[i]);

    // no noise, no viscosity, single mode: trajectory returns to w0
    PathDraws quiet = draws;
    quiet.normals.assign(16, 0.0);
    ForcingConfig off = no_forcing(4);
    spec.ordering_draw = 0;
    const SpectralField back = swss_trajectory(basis_field({1, 0}, 4), spec, quiet,
                                               flow(0.0, 1.0, 4), off);
    CHECK(norm_diff(back, basis_field({1, 0}, 4)) <= 1e-12);
}

TEST_CASE("swss trajectory: insufficient draws are rejected") {
    const FlowConfig cfg = flow(0.01, 1.0, 4);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}};
    PathDraws draws;
    draws.steps = 2;
    draws.dim = 1;
    draws.normals.assign(2, 0.0);
    SchemeSpec spec;
    spec.kind = SchemeKind::swss;
    spec.steps = 4;
    spec.horizon = 1.0;
    spec.ordering_draw = 0;
    CHECK_THROWS_AS(swss_trajectory(SpectralField(4), spec, draws, cfg, forcing),
                    std::invalid_argument);
}

TEST_CASE("norm conservation with zero forcing and eps = 1") {
    const FlowConfig cfg = flow(0.0, 1.0, 6);
    const ForcingConfig off = no_forcing(2);
    const SpectralField w0 = oracles::random_field(6, 21, 1.0);
    const double n0 = sobolev_norm(w0, 0.0);
    PathDraws draws;
    draws.steps = 8;
    draws.dim = 2;
    draws.normals.assign(16, 0.0);
    for (SchemeKind kind : {SchemeKind::strang, SchemeKind::lie, SchemeKind::swss}) {
        SchemeSpec spec;
        spec.kind = kind;
        spec.steps = 8;
        spec.horizon = 1.0;
        spec.ordering_draw = 0;
        const SpectralField end = scheme_trajectory(w0, spec, draws, cfg, off);
        CHECK(std::abs(sobolev_norm(end, 0.0) - n0) <= 1e-8 * n0);
    }
}

TEST_CASE("lie scheme shows first-order self-convergence") {
    // N = 8 configuration of the reference experiment, per-mode amplitudes
    // in the orthonormal normalization
    const int N = 8;
    const FlowConfig cfg = flow(0.01, 1.0, N);
    ForcingConfig forcing;
    const double q = 0.7071067811865476;
    forcing.modes = {{{1, 0}, q}, {{-1, 0}, q}, {{1, 1}, q}, {{-1, -1}, q}};
    const int d = 4;
    const std::uint64_t K = 2048;
    const SpectralField w0(N);

    auto estimate = [&](int steps) {
        const SobolStream stream(steps * d + 1, default_direction_file());
        SchemeSpec spec;
        spec.kind = SchemeKind::lie;
        spec.steps = steps;
        spec.horizon = 1.0;
        std::vector<double> vals(K);
        for (std::uint64_t k = 0; k < K; ++k) {
            const PathDraws draws = path_draws(stream, k, steps, d);
            vals[k] = sobolev_norm(scheme_trajectory(w0, spec, draws, cfg, forcing), 0.0);
        }
        double s = 0.0;
        for (double v : vals) s += v;
        return s / static_cast<double>(K);
    };

    const double ref = estimate(128);
    std::vector<double> logn, loge;
    for (int steps : {4, 8, 16, 32}) {
        const double err = std::abs(estimate(steps) - ref) / std::abs(ref);
        logn.push_back(std::log2(static_cast<double>(steps)));
        loge.push_back(std::log2(err));
    }
    // least-squares slope of log2(err) vs log2(n)
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
        mx += logn[i];
        my += loge[i];
    }
    mx /= logn.size();
    my /= loge.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < logn.size(); ++i) {
        num += (logn[i] - mx) * (loge[i] - my);
        den += (logn[i] - mx) * (logn[i] - mx);
    }
    const double slope = -num / den;
    CHECK(slope > 0.7);
    CHECK(slope < 1.3);
}

TEST_CASE("per-step ordering redraws change the endpoint") {
    const FlowConfig cfg = flow(0.01, 1.0, 4);
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{1, 1}, 1.0}};
    PathDraws draws;
    draws.steps = 6;
    draws.dim = 2;
    draws.normals.assign(12, 0.0);
    std::uint64_t state = 8;
    for (double& x : draws.normals) x = 2.0 * splitmix_uniform(state) - 1.0;
    draws.bernoulli = 0;
    draws.order_uniform = 0.37;

    SchemeSpec spec;
    spec.kind = SchemeKind::swss;
    spec.steps = 6;
    spec.horizon = 1.0;
    const SpectralField w0 = oracles::random_field(4, 3, 0.5);
    const SpectralField fixed = swss_trajectory(w0, spec, draws, cfg, forcing);
    spec.redraw_per_step = true;
    const SpectralField mixed = swss_trajectory(w0, spec, draws, cfg, forcing);
    CHECK(norm_diff(fixed, mixed) > 1e-10);
}
