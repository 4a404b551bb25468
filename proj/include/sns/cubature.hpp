#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sns/field.hpp"
#include "sns/flows.hpp"

namespace sns {

/// Piecewise-linear path omega = (omega^0, ..., omega^d) with omega^0(s) = s
/// and omega(0) = 0.  Brownian components are stored row-major per
/// breakpoint; the time component is the breakpoint itself.
struct CubaturePath {
    int dim = 0;
    std::vector<double> time;    // L increasing values, first 0
    std::vector<double> values;  // L x dim, values[l*dim + (j-1)] = omega^j(time[l])

    int breakpoints() const { return static_cast<int>(time.size()); }
    double omega(int j, int l) const {
        return j == 0 ? time[l] : values[static_cast<std::size_t>(l) * dim + (j - 1)];
    }
    std::span<const double> endpoint() const {
        return {values.data() + static_cast<std::size_t>(breakpoints() - 1) * dim,
                static_cast<std::size_t>(dim)};
    }
};

/// Weighted paths matching Brownian iterated-Stratonovich expectations for
/// all multi-indices with k + #zeros <= order.  horizon is 1 for a formula
/// as defined; scale_formula produces the same structure on [0, dt].
struct CubatureFormula {
    int dim = 0;
    int order = 3;
    double horizon = 1.0;
    std::vector<CubaturePath> paths;
    std::vector<double> weights;

    int size() const { return static_cast<int>(paths.size()); }
};

/// 2d straight-line paths t -> t * (+-sqrt(d) e_j), weights 1/(2d); a
/// symmetric formula of order 3.
CubatureFormula degree3_formula(int dim);

/// Time component rescaled to [0, dt], Brownian components by sqrt(dt).
CubatureFormula scale_formula(const CubatureFormula& f, double dt);

/// Exact iterated integral of the path along the multi-index (letters in
/// {0..d}), computed segmentwise in closed form.  Supports
/// |multi_index| + #zeros <= 5.
double iterated_path_integral(const CubaturePath& path, std::span<const int> multi_index);

/// E of the corresponding iterated Stratonovich integral of Brownian
/// motion with time over [0, 1] (the reference moments; degree <= 5).
double brownian_expected_iterated(std::span<const int> multi_index);

struct MomentMismatch {
    std::vector<int> multi_index;
    double got = 0.0;
    double expected = 0.0;
};

struct ValidationReport {
    bool pass = false;
    int order = 0;
    int checked = 0;
    std::vector<MomentMismatch> mismatches;
};

/// Compares every moment with k + #zeros <= order against the Brownian
/// reference (scaled by the formula horizon); tolerance 1e-12.
ValidationReport validate_formula(const CubatureFormula& f);
ValidationReport validate_formula(const CubatureFormula& f, int order);

/// Endpoint symmetry: every path has a unique partner of equal weight and
/// negated Brownian endpoint.
bool is_symmetric(const CubatureFormula& f);

/// Adds the sign-reflected paths with halved weights.
CubatureFormula symmetrize(const CubatureFormula& f);

/// Plain-text formula files; the grammar is documented in the README.
CubatureFormula load_formula(const std::string& file);
void save_formula(const CubatureFormula& f, const std::string& file);

struct WeightedState {
    double weight = 0.0;
    SpectralField state;
};

/// Integrates one (dt-scaled) cubature path: dw = (nu Lap w + pi_N B) ds
/// + sum_j q_j f_{k_j} d omega^j, RK4 with the usual CFL substep rule.
SpectralField cubature_branch_step(const SpectralField& w0, double dt, const CubaturePath& path,
                                   const FlowConfig& cfg, const ForcingConfig& forcing,
                                   int branch_index);

/// One weak cubature step: integrates dw = (nu Lap w + pi_N B(Kw,w)) ds
/// + sum_j q_j f_{k_j} d omega^j along every (dt-scaled) path with RK4
/// substeps under the usual CFL rule.  Requires a symmetric formula.
std::vector<WeightedState> cubature_weak_step(const SpectralField& w, double dt,
                                              const CubatureFormula& formula,
                                              const FlowConfig& cfg,
                                              const ForcingConfig& forcing);

struct CubatureEstimateOptions {
    std::uint64_t budget = 100000;  // full tree if M^n fits, else sampled trajectories
    std::uint64_t seed = 0x5eed5eedull;
    int workers = 1;
    bool skip_validation = false;
    bool force_sampling = false;  // sample even when the tree would fit
};

/// n-fold composition of the weak step applied to a functional: the exact
/// weighted tree when M^n <= budget, otherwise weight-proportional branch
/// sampling with `budget` trajectories (unbiased).
double cubature_estimate(const SpectralField& w0, double horizon, int steps,
                         const CubatureFormula& formula,
                         const std::function<double(const SpectralField&)>& functional,
                         const FlowConfig& cfg, const ForcingConfig& forcing,
                         const CubatureEstimateOptions& opts = {});

}  // namespace sns
