#pragma once

#include <optional>
#include <span>

#include "sns/draws.hpp"
#include "sns/field.hpp"
#include "sns/flows.hpp"

namespace sns {

enum class SchemeKind { strang, lie, swss };

struct SchemeSpec {
    SchemeKind kind = SchemeKind::swss;
    int steps = 1;
    double horizon = 1.0;
    /// swss ordering: 0 = deterministic flow first, 1 = OU flow first.
    /// Normally taken from the trajectory's draws; set to pin it.
    std::optional<int> ordering_draw;
    /// Redraw the swss ordering every step instead of once per trajectory
    /// (bits expanded deterministically from the single ordering draw).
    bool redraw_per_step = false;
};

/// One Strang step: deterministic half-step, exact OU step over dt,
/// deterministic half-step.  Consumes d normals.
SpectralField strang_path_step(const SpectralField& w, double dt,
                               std::span<const double> normals, const FlowConfig& cfg,
                               const ForcingConfig& forcing);
SpectralField strang_path_step(const SpectralField& w, const OUStepParams& params,
                               std::span<const double> normals, const FlowConfig& cfg);

/// One Lie step: deterministic flow over dt, then the OU step (first weak
/// order).
SpectralField lie_path_step(const SpectralField& w, double dt, std::span<const double> normals,
                            const FlowConfig& cfg, const ForcingConfig& forcing);
SpectralField lie_path_step(const SpectralField& w, const OUStepParams& params,
                            std::span<const double> normals, const FlowConfig& cfg);

/// Full n-step trajectory of the symmetrically weighted sequential
/// splitting: the ordering bit (drawn once per trajectory) selects
/// (P1 P2)^n or (P2 P1)^n pathwise.
SpectralField swss_trajectory(const SpectralField& w0, const SchemeSpec& spec,
                              const PathDraws& draws, const FlowConfig& cfg,
                              const ForcingConfig& forcing);

/// Runs a full trajectory of any scheme (used by the estimator).
SpectralField scheme_trajectory(const SpectralField& w0, const SchemeSpec& spec,
                                const PathDraws& draws, const FlowConfig& cfg,
                                const ForcingConfig& forcing);

}  // namespace sns
