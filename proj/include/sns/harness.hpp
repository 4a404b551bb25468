#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sns/field.hpp"
#include "sns/flows.hpp"
#include "sns/splitting.hpp"

namespace sns {

enum class EstimatorScheme { strang, lie, swss, cubature3 };

/// How configured forcing amplitudes map onto the unit-norm eigenbasis.
/// "pair" interprets q against the exponential-convention eigenfunctions
/// cos(k.x)/(2 pi) and sin(k.x)/(2 pi), whose L2 norm is 1/sqrt(2), so the
/// per-mode amplitude becomes q/sqrt(2); this matches the convention the
/// bundled reference expectations were computed with.  "orthonormal"
/// applies q directly.
enum class ForcingInterpretation { pair, orthonormal };

struct FunctionalSpec {
    std::vector<double> norm_exponents{-1.0, 0.0, 1.0};
    std::optional<double> psi_eta;

    int count() const {
        return static_cast<int>(norm_exponents.size()) + (psi_eta ? 1 : 0);
    }
    std::vector<std::string> names() const;
};

struct ExperimentConfig {
    double nu = 0.01;
    double epsilon = 1.0;
    int degree = 16;       // N
    int steps = 64;        // n
    double horizon = 1.0;  // T
    std::uint64_t paths = 4096;  // K
    EstimatorScheme scheme = EstimatorScheme::swss;
    std::vector<ForcedMode> forcing = default_forcing();
    ForcingInterpretation forcing_convention = ForcingInterpretation::pair;
    FunctionalSpec functionals;
    std::optional<std::vector<double>> reference;  // one value per functional
    std::string output_path;
    int workers = 0;  // 0 = hardware concurrency
    bool swss_redraw_per_step = false;
    double cfl_safety = 0.8;
    std::string direction_file;  // empty = bundled default
    DrawConstruction qmc_construction = DrawConstruction::bridge;
    std::uint64_t cubature_seed = 0x5eed5eedull;

    /// The default forced modes: k = (1,0), (-1,0), (1,1), (-1,-1), q = 1.
    static std::vector<ForcedMode> default_forcing();
};

struct EstimateResult {
    std::vector<std::string> functional_names;
    std::vector<double> estimates;
    std::optional<std::vector<double>> relative_errors;
    std::uint64_t paths = 0;
    double wall_seconds = 0.0;
    std::string metadata;  // substep rule + draw layout, for comparability
};

/// Averages the functionals over `paths` QMC-driven trajectories of the
/// configured scheme.  Deterministic: the reduction is a fixed-order
/// pairwise sum over path index, so the result is bit-identical for any
/// worker count.  A blow-up on any path aborts with path and step.
EstimateResult run_estimate(const ExperimentConfig& cfg);

enum class StudyAxis { timesteps, modes, paths };

struct StudyResult {
    StudyAxis axis;
    std::vector<std::string> functional_names;
    std::vector<std::uint64_t> axis_values;
    std::vector<EstimateResult> results;
    /// Relative error per run per functional, against the supplied
    /// reference or the finest-grid run.
    std::vector<std::vector<double>> relative_errors;
    /// log2 of successive error quotients (NaN on the first row or where
    /// an error vanishes).
    std::vector<std::vector<double>> log2_ratios;
    ExperimentConfig base;
};

/// Reruns the estimate along one axis of the grid (ascending), holding
/// everything else at cfg.  Without cfg.reference the finest grid value
/// serves as reference.
StudyResult convergence_study(const ExperimentConfig& cfg, StudyAxis axis,
                              const std::vector<std::uint64_t>& grid);

/// One header row plus one row per run; numbers carry 17 significant
/// digits so a reparse reproduces them exactly.
void emit_csv(const StudyResult& study, const std::string& path);

/// Single-estimate convenience wrapper around the same writer.
void emit_csv(const ExperimentConfig& cfg, const EstimateResult& r, const std::string& path);

std::string default_direction_file();
std::string scheme_name(EstimatorScheme s);
EstimatorScheme scheme_from_name(const std::string& name);
std::string axis_name(StudyAxis a);
StudyAxis axis_from_name(const std::string& name);

}  // namespace sns
