#include "sns/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "sns/cubature.hpp"
#include "sns/field.hpp"
#include "sns/flows.hpp"
#include "sns/grid.hpp"
#include "sns/harness.hpp"
#include "sns/oracles.hpp"
#include "sns/rng.hpp"
#include "sns/sobol.hpp"

namespace sns {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

CheckResult timed(const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
        auto [pass, detail] = body();
        r.pass = pass;
        r.detail = detail;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// (a) <B(Kw,w), w> = 0 relative to ||w||_1^2
std::pair<bool, std::string> check_energy_orthogonality() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int N = 4 + (i * 7) % 29;  // degrees 4..32
        const SpectralField w = oracles::random_field(N, 1000 + i, 1.0);
        const SpectralField b = workspace_for(N).nonlinear_term(w);
        const double h1 = sobolev_norm(w, 1.0);
        const double rel = std::abs(l2_inner(b, w)) / (h1 * h1);
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-10, "max |<B,w>|/||w||_1^2 = " + fmt(worst)};
}

// (b) dealiased pseudospectral product == direct convolution at N = 8
std::pair<bool, std::string> check_dealiasing_exact() {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const SpectralField w = oracles::random_field(8, 2000 + i, 1.0);
        SpectralField diff = workspace_for(8).nonlinear_term(w);
        diff -= oracles::nonlinear_direct_convolution(w);
        const double rel = sobolev_norm(diff, 0.0) /
                           std::max(1e-300, sobolev_norm(oracles::nonlinear_direct_convolution(w), 0.0));
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-12, "max rel deviation = " + fmt(worst)};
}

// (c) RK4 contractivity with epsilon = 1
std::pair<bool, std::string> check_rk4_contractivity() {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int N = 4 + (i * 5) % 13;
        FlowConfig cfg;
        cfg.nu = 0.01;
        cfg.epsilon = 1.0;
        cfg.degree = N;
        const SpectralField w = oracles::random_field(N, 3000 + i, 2.0);
        const SpectralField out = rk4_flow(w, 0.5, cfg);
        const double growth = sobolev_norm(out, 0.0) / sobolev_norm(w, 0.0);
        worst = std::max(worst, growth);
    }
    return {worst <= 1.0 + 1e-8, "max ||out||/||in|| - 1 = " + fmt(worst - 1.0)};
}

// (d) OU sampler: sample variance vs closed form; half-step composition
std::pair<bool, std::string> check_ou_sampler() {
    FlowConfig cfg;
    cfg.nu = 0.01;
    cfg.epsilon = 1.0;
    cfg.degree = 4;
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}};
    const double t = 1.0;
    const OUStepParams params = ou_params(t, cfg, forcing);
    const SpectralField zero(cfg.degree);

    // One-dimensional draws through a deterministic stream; a coarse
    // Box-Muller is fine here since only the first two moments matter.
    std::uint64_t state = 99;
    oracles::Moments mom;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double u1 = splitmix_uniform(state);
        const double u2 = splitmix_uniform(state);
        const double g = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
        const double draw[1] = {g};
        const SpectralField w = ou_exact_step(zero, params, draw);
        mom.add(w(1, 0));
    }
    const double sigma2 = params.forced[0].sigma * params.forced[0].sigma;
    const double dev = std::abs(mom.variance() - sigma2) / mom.stderr_variance();

    const OUStepParams half = ou_params(0.5 * t, cfg, forcing);
    const double shalf = half.forced[0].sigma;
    const double lam = -cfg.epsilon * cfg.nu;  // |k|^2 = 1
    const double composed = std::exp(2.0 * lam * 0.5 * t) * shalf * shalf + shalf * shalf;
    const double comp_err = std::abs(composed - sigma2) / sigma2;
    const double mean_err = std::abs(half.decay_at({1, 0}) * half.decay_at({1, 0}) -
                                     params.decay_at({1, 0}));

    const bool pass = dev <= 3.0 && comp_err <= 1e-12 && mean_err <= 1e-12;
    return {pass, "variance dev = " + fmt(dev) + " se, composition err = " + fmt(comp_err) +
                      ", mean err = " + fmt(mean_err)};
}

// (e) closed-form MGF vs Monte Carlo
std::pair<bool, std::string> check_psi_expectation() {
    FlowConfig cfg;
    cfg.nu = 0.01;
    cfg.epsilon = 1.0;
    cfg.degree = 2;
    ForcingConfig forcing;
    forcing.modes = {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{1, 1}, 1.0}, {{-1, -1}, 1.0}};
    const OUStepParams params = ou_params(1.0, cfg, forcing);
    const SpectralField zero(cfg.degree);
    const double eta = 0.1;
    const double closed = ou_psi_expectation(zero, params, eta);

    std::uint64_t state = 2024;
    oracles::Moments mom;
    const int n = 1'000'000;
    std::vector<double> g(4);
    for (int i = 0; i < n; ++i) {
        double s2 = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double u1 = splitmix_uniform(state);
            const double u2 = splitmix_uniform(state);
            g[j] = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(6.283185307179586 * u2);
            const double c = params.forced[j].sigma * g[j];
            s2 += c * c;
        }
        mom.add(std::exp(eta * s2));
    }
    const double dev = std::abs(mom.mean - closed) / mom.stderr_mean();
    return {dev <= 3.0, "closed form = " + fmt(closed) + ", MC dev = " + fmt(dev) + " se"};
}

// (f) degree-3 cubature: moment validation and odd endpoint monomials
std::pair<bool, std::string> check_cubature_moments() {
    for (int d : {1, 2, 4, 8}) {
        const CubatureFormula f = degree3_formula(d);
        const ValidationReport rep = validate_formula(f);
        if (!rep.pass)
            return {false, "degree-3 formula fails moment validation at d = " + fmt(d)};
        if (!is_symmetric(f)) return {false, "degree-3 formula not symmetric at d = " + fmt(d)};
        // odd monomials of the endpoints up to total degree 5
        std::vector<int> expo(d, 0);
        const std::function<bool(int, int)> scan = [&](int j, int remaining) -> bool {
            if (j == d) {
                int total = 0;
                for (int e : expo) total += e;
                if (total % 2 == 0) return true;
                double acc = 0.0;
                for (int i = 0; i < f.size(); ++i) {
                    double m = f.weights[i];
                    auto z = f.paths[i].endpoint();
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < expo[c]; ++e) m *= z[c];
                    acc += m;
                }
                return std::abs(acc) <= 1e-14;
            }
            for (int e = 0; e <= remaining; ++e) {
                expo[j] = e;
                if (!scan(j + 1, remaining - e)) return false;
            }
            expo[j] = 0;
            return true;
        };
        if (!scan(0, 5)) return {false, "odd endpoint monomial survives at d = " + fmt(d)};
    }
    return {true, "d in {1,2,4,8}: moments to 1e-12, odd monomials vanish"};
}

// (g) Sobol' points match the sequential reference generator bit for bit
std::pair<bool, std::string> check_sobol_reference(const std::string& direction_file) {
    const int D = 64;
    const SobolStream stream(D, direction_file);
    oracles::ReferenceSobol ref(D, direction_file);
    std::vector<double> mine(D);
    for (int i = 0; i < 1024; ++i) {
        const std::vector<double> expect = ref.next();
        stream.point(static_cast<std::uint64_t>(i), mine);
        for (int j = 0; j < D; ++j)
            if (mine[j] != expect[j])
                return {false,
                        "mismatch at point " + std::to_string(i) + " dim " + std::to_string(j)};
    }
    // spot values of the published sequence (dimension 2, points 1..4)
    const SobolStream s2(2, direction_file);
    const double expect2[4][2] = {{0.5, 0.5}, {0.75, 0.25}, {0.25, 0.75}, {0.375, 0.375}};
    for (int i = 1; i <= 4; ++i) {
        const std::vector<double> p = s2.point(static_cast<std::uint64_t>(i));
        if (p[0] != expect2[i - 1][0] || p[1] != expect2[i - 1][1])
            return {false, "published spot value mismatch at point " + std::to_string(i)};
    }
    return {true, "1024 points x 64 dims bit-exact"};
}

// (h) run_estimate is bit-identical across worker counts
std::pair<bool, std::string> check_worker_invariance(const std::string& direction_file) {
    ExperimentConfig cfg;
    cfg.degree = 4;
    cfg.steps = 4;
    cfg.paths = 192;
    cfg.scheme = EstimatorScheme::swss;
    cfg.direction_file = direction_file;
    std::vector<std::vector<double>> estimates;
    for (int workers : {1, 4, 16}) {
        cfg.workers = workers;
        estimates.push_back(run_estimate(cfg).estimates);
    }
    for (std::size_t i = 1; i < estimates.size(); ++i)
        for (std::size_t f = 0; f < estimates[0].size(); ++f)
            if (estimates[i][f] != estimates[0][f])
                return {false, "estimates differ between 1 and " +
                                   std::to_string(i == 1 ? 4 : 16) + " workers"};
    return {true, "workers {1,4,16} bit-identical"};
}

}  // namespace

std::vector<CheckResult> run_property_suite(const PropertySuiteOptions& opts) {
    const std::string dir =
        opts.direction_file.empty() ? default_direction_file() : opts.direction_file;
    std::vector<CheckResult> out;
    out.push_back(timed("energy-orthogonality", check_energy_orthogonality));
    out.push_back(timed("dealiasing-vs-convolution", check_dealiasing_exact));
    out.push_back(timed("rk4-contractivity", check_rk4_contractivity));
    out.push_back(timed("ou-exact-law", check_ou_sampler));
    out.push_back(timed("psi-mgf-closed-form", check_psi_expectation));
    out.push_back(timed("cubature-degree3-moments", check_cubature_moments));
    out.push_back(timed("sobol-reference-bitexact", [&] { return check_sobol_reference(dir); }));
    out.push_back(timed("worker-invariance", [&] { return check_worker_invariance(dir); }));
    return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace sns
