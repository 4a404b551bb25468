#pragma once

#include <span>
#include <vector>

#include "sns/field.hpp"

namespace sns {

/// Parameters of the split system: the deterministic sub-flow carries
/// (1-epsilon) nu of the viscosity, the stochastic heat sub-flow carries
/// epsilon nu.  epsilon = 1 gives a pure Euler equation plus an
/// Ornstein-Uhlenbeck flow.
struct FlowConfig {
    double nu = 0.01;
    double epsilon = 1.0;  // in (0, 1]
    int degree = 16;
    double cfl_safety = 0.8;
};

struct ForcedMode {
    WaveIndex k;
    double amplitude = 1.0;
};

/// The forced wavenumbers k_j with amplitudes q_j (per unit-norm
/// eigenfunction).  Zero amplitudes are allowed and mean "unforced".
struct ForcingConfig {
    std::vector<ForcedMode> modes;
    int dimension() const { return static_cast<int>(modes.size()); }
};

/// Exact one-step law of the Ornstein-Uhlenbeck sub-flow over [0, t]:
/// every coefficient decays by exp(lambda_k t) with lambda_k =
/// -epsilon nu |k|^2, and forced coefficient j picks up an independent
/// N(0, sigma_j(t)^2) increment.
struct OUStepParams {
    double t = 0.0;
    double eps_nu = 0.0;
    int degree = 0;
    std::vector<double> decay;  // same layout as SpectralField::raw()
    struct Forced {
        WaveIndex k;
        double sigma;
    };
    std::vector<Forced> forced;

    double decay_at(WaveIndex k) const;
};

/// (1-epsilon) nu Laplacian(w) + pi_N B(Kw, w).
SpectralField euler_rhs(const SpectralField& w, const FlowConfig& cfg);

/// Classical RK4 for the deterministic sub-flow.  The substep count keeps
/// N * max|Kw| * h <= 2.8 * cfl_safety (RK4 imaginary-axis stability),
/// with max|Kw| evaluated on the dealiased grid once per call.
SpectralField rk4_flow(const SpectralField& w0, double t, const FlowConfig& cfg);

/// Same integrator with an explicit substep count.
SpectralField rk4_flow_steps(const SpectralField& w0, double t, int substeps,
                             const FlowConfig& cfg);

/// sigma_j(t) = |q_j| sqrt((1 - exp(2 t lambda)) / (-2 lambda)) and the
/// per-mode decay factors.  Rejects t <= 0 and forced modes outside H_N.
OUStepParams ou_params(double t, const FlowConfig& cfg, const ForcingConfig& forcing);

/// Applies the exact OU step; gaussians must hold one standard normal
/// draw per forced mode.
SpectralField ou_exact_step(const SpectralField& w0, const OUStepParams& params,
                            std::span<const double> gaussians);

/// Closed form of E[exp(eta ||w2(t, w0)||^2)] for the OU sub-flow.
/// Requires 1 - 2 eta sigma_j(t)^2 > 0 for every forced mode.
double ou_psi_expectation(const SpectralField& w0, const OUStepParams& params, double eta);

}  // namespace sns
