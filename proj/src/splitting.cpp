#include "sns/splitting.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "sns/errors.hpp"
#include "sns/rng.hpp"

namespace sns {

SpectralField strang_path_step(const SpectralField& w, const OUStepParams& params,
                               std::span<const double> normals, const FlowConfig& cfg) {
    SpectralField v = rk4_flow(w, 0.5 * params.t, cfg);
    v = ou_exact_step(v, params, normals);
    return rk4_flow(v, 0.5 * params.t, cfg);
}

SpectralField strang_path_step(const SpectralField& w, double dt,
                               std::span<const double> normals, const FlowConfig& cfg,
                               const ForcingConfig& forcing) {
    return strang_path_step(w, ou_params(dt, cfg, forcing), normals, cfg);
}

SpectralField lie_path_step(const SpectralField& w, const OUStepParams& params,
                            std::span<const double> normals, const FlowConfig& cfg) {
    return ou_exact_step(rk4_flow(w, params.t, cfg), params, normals);
}

SpectralField lie_path_step(const SpectralField& w, double dt, std::span<const double> normals,
                            const FlowConfig& cfg, const ForcingConfig& forcing) {
    return lie_path_step(w, ou_params(dt, cfg, forcing), normals, cfg);
}

SpectralField scheme_trajectory(const SpectralField& w0, const SchemeSpec& spec,
                                const PathDraws& draws, const FlowConfig& cfg,
                                const ForcingConfig& forcing) {
    if (spec.steps < 1) throw std::invalid_argument("scheme_trajectory: steps must be >= 1");
    if (!(spec.horizon > 0.0))
        throw std::invalid_argument("scheme_trajectory: horizon must be > 0");
    if (draws.steps < spec.steps || draws.dim != forcing.dimension())
        throw std::invalid_argument("scheme_trajectory: draws provide " +
                                    std::to_string(draws.steps) + "x" +
                                    std::to_string(draws.dim) + " normals, need " +
                                    std::to_string(spec.steps) + "x" +
                                    std::to_string(forcing.dimension()));

    const double dt = spec.horizon / spec.steps;
    const OUStepParams params = ou_params(dt, cfg, forcing);

    int order = 0;
    std::uint64_t order_state = 0;
    if (spec.kind == SchemeKind::swss) {
        order = spec.ordering_draw ? *spec.ordering_draw : draws.bernoulli;
        if (spec.redraw_per_step)
            order_state = std::bit_cast<std::uint64_t>(draws.order_uniform) ^
                          (spec.ordering_draw ? static_cast<std::uint64_t>(*spec.ordering_draw)
                                              : 0u);
    }

    SpectralField w = w0;
    for (int s = 0; s < spec.steps; ++s) {
        const auto normals = draws.step_normals(s);
        try {
            switch (spec.kind) {
                case SchemeKind::strang:
                    w = strang_path_step(w, params, normals, cfg);
                    break;
                case SchemeKind::lie:
                    w = lie_path_step(w, params, normals, cfg);
                    break;
                case SchemeKind::swss: {
                    int bit = order;
                    if (spec.redraw_per_step) bit = static_cast<int>(splitmix64(order_state) & 1u);
                    if (bit == 0) {
                        w = rk4_flow(w, dt, cfg);
                        w = ou_exact_step(w, params, normals);
                    } else {
                        w = ou_exact_step(w, params, normals);
                        w = rk4_flow(w, dt, cfg);
                    }
                    break;
                }
            }
        } catch (const BlowUpError& e) {
            throw BlowUpError(std::string(e.what()) + " [trajectory step " +
                                  std::to_string(s + 1) + "/" + std::to_string(spec.steps) + "]",
                              s + 1);
        }
    }
    return w;
}

SpectralField swss_trajectory(const SpectralField& w0, const SchemeSpec& spec,
                              const PathDraws& draws, const FlowConfig& cfg,
                              const ForcingConfig& forcing) {
    if (spec.kind != SchemeKind::swss)
        throw std::invalid_argument("swss_trajectory: spec.kind must be swss");
    return scheme_trajectory(w0, spec, draws, cfg, forcing);
}

}  // namespace sns
