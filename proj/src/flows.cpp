#include "sns/flows.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sns/errors.hpp"
#include "sns/grid.hpp"
#include "sns/spectral_ops.hpp"

namespace sns {

namespace {

constexpr double kRk4ImaginaryStability = 2.8;

void check_config(const FlowConfig& cfg) {
    if (!(cfg.nu >= 0.0)) throw std::invalid_argument("FlowConfig: nu must be >= 0");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
        throw std::invalid_argument("FlowConfig: epsilon must lie in (0,1]");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw std::invalid_argument("FlowConfig: cfl_safety must lie in (0,1]");
    if (cfg.degree < 1) throw std::invalid_argument("FlowConfig: degree must be >= 1");
}

}  // namespace

double OUStepParams::decay_at(WaveIndex k) const {
    return std::exp(-eps_nu * k.norm2() * t);
}

SpectralField euler_rhs(const SpectralField& w, const FlowConfig& cfg) {
    check_config(cfg);
    SpectralField rhs = workspace_for(w.degree()).nonlinear_term(w);
    const double visc = (1.0 - cfg.epsilon) * cfg.nu;
    if (visc != 0.0) {
        const int N = w.degree();
        for (int k2 = -N; k2 <= N; ++k2)
            for (int k1 = -N; k1 <= N; ++k1) {
                if (k1 == 0 && k2 == 0) continue;
                rhs.add(k1, k2, -visc * (k1 * k1 + k2 * k2) * w(k1, k2));
            }
    }
    return rhs;
}

SpectralField rk4_flow_steps(const SpectralField& w0, double t, int substeps,
                             const FlowConfig& cfg) {
    check_config(cfg);
    if (t < 0.0) throw std::invalid_argument("rk4_flow: t must be >= 0");
    if (substeps < 1) throw std::invalid_argument("rk4_flow: substeps must be >= 1");
    if (t == 0.0) return w0;

    const double h = t / substeps;
    SpectralField w = w0;
    SpectralField acc(w.degree());
    SpectralField tmp(w.degree());
    for (int s = 0; s < substeps; ++s) {
        SpectralField k = euler_rhs(w, cfg);
        acc = w;
        acc.axpy(h / 6.0, k);
        tmp = w;
        tmp.axpy(0.5 * h, k);
        k = euler_rhs(tmp, cfg);
        acc.axpy(h / 3.0, k);
        tmp = w;
        tmp.axpy(0.5 * h, k);
        k = euler_rhs(tmp, cfg);
        acc.axpy(h / 3.0, k);
        tmp = w;
        tmp.axpy(h, k);
        k = euler_rhs(tmp, cfg);
        acc.axpy(h / 6.0, k);
        w = acc;
        if (!w.finite())
            throw BlowUpError("rk4_flow: non-finite state after substep " +
                                  std::to_string(s + 1) + " of " + std::to_string(substeps) +
                                  " (h = " + std::to_string(h) + ")",
                              s + 1);
    }
    return w;
}

SpectralField rk4_flow(const SpectralField& w0, double t, const FlowConfig& cfg) {
    check_config(cfg);
    if (t < 0.0) throw std::invalid_argument("rk4_flow: t must be >= 0");
    if (t == 0.0) return w0;
    const double speed = workspace_for(w0.degree()).max_speed(w0);
    int substeps = 1;
    const double advect = cfg.degree * speed;
    if (advect > 0.0) {
        const double hmax = kRk4ImaginaryStability * cfg.cfl_safety / advect;
        substeps = std::max(1, static_cast<int>(std::ceil(t / hmax)));
    }
    return rk4_flow_steps(w0, t, substeps, cfg);
}

OUStepParams ou_params(double t, const FlowConfig& cfg, const ForcingConfig& forcing) {
    check_config(cfg);
    if (!(t > 0.0)) throw std::invalid_argument("ou_params: t must be > 0");
    OUStepParams p;
    p.t = t;
    p.eps_nu = cfg.epsilon * cfg.nu;
    p.degree = cfg.degree;

    const int N = cfg.degree;
    const int side = 2 * N + 1;
    p.decay.assign(static_cast<std::size_t>(side) * side, 0.0);
    for (int k2 = -N; k2 <= N; ++k2)
        for (int k1 = -N; k1 <= N; ++k1) {
            const std::size_t i = static_cast<std::size_t>(k1 + N) +
                                  static_cast<std::size_t>(side) * (k2 + N);
            p.decay[i] = std::exp(-p.eps_nu * (k1 * k1 + k2 * k2) * t);
        }

    p.forced.reserve(forcing.modes.size());
    for (const ForcedMode& m : forcing.modes) {
        if (m.k.zero() || m.k.degree() > N)
            throw std::invalid_argument("ou_params: forced mode (" + std::to_string(m.k.k1) +
                                        "," + std::to_string(m.k.k2) +
                                        ") outside the truncation H_" + std::to_string(N));
        const double lambda = -p.eps_nu * m.k.norm2();
        double var;
        if (lambda == 0.0) {
            var = t;
        } else {
            // (1 - exp(2 t lambda)) / (-2 lambda), stable for t -> 0
            var = std::expm1(2.0 * t * lambda) / (2.0 * lambda);
        }
        p.forced.push_back({m.k, std::abs(m.amplitude) * std::sqrt(var)});
    }
    return p;
}

SpectralField ou_exact_step(const SpectralField& w0, const OUStepParams& params,
                            std::span<const double> gaussians) {
    if (w0.degree() != params.degree)
        throw std::invalid_argument("ou_exact_step: degree mismatch");
    if (gaussians.size() != params.forced.size())
        throw std::invalid_argument("ou_exact_step: expected " +
                                    std::to_string(params.forced.size()) + " draws, got " +
                                    std::to_string(gaussians.size()));
    SpectralField w = w0;
    auto c = w.raw();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= params.decay[i];
    for (std::size_t j = 0; j < params.forced.size(); ++j)
        w.add(params.forced[j].k.k1, params.forced[j].k.k2,
              params.forced[j].sigma * gaussians[j]);
    return w;
}

double ou_psi_expectation(const SpectralField& w0, const OUStepParams& params, double eta) {
    if (w0.degree() != params.degree)
        throw std::invalid_argument("ou_psi_expectation: degree mismatch");
    SpectralField decayed = w0;
    auto c = decayed.raw();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= params.decay[i];

    double s2 = 0.0;
    for (double v : decayed.raw()) s2 += v * v;

    double log_prefactor = 0.0;
    double exponent = eta * s2;
    for (const auto& f : params.forced) {
        const double denom = 1.0 - 2.0 * eta * f.sigma * f.sigma;
        if (denom <= 0.0)
            throw std::invalid_argument(
                "ou_psi_expectation: MGF diverges at mode (" + std::to_string(f.k.k1) + "," +
                std::to_string(f.k.k2) + "): 1 - 2 eta sigma^2 = " + std::to_string(denom));
        const double proj = decayed(f.k);
        log_prefactor -= 0.5 * std::log(denom);
        exponent += 2.0 * eta * eta * proj * proj * f.sigma * f.sigma / denom;
    }
    return std::exp(log_prefactor + exponent);
}

}  // namespace sns
