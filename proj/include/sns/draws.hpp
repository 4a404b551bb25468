#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sns/sobol.hpp"

namespace sns {

/// How Sobol' coordinates are turned into the per-step increment normals.
/// "bridge" builds each noise channel by bisection (endpoint first, then
/// midpoints), so the lowest -- most uniform -- coordinates carry the
/// coarse path structure; "increments" maps coordinate s*d+j directly to
/// step s.  Both produce i.i.d. standard normals per (step, channel); the
/// bridge keeps the deterministic integration error small when n*d is
/// large.
enum class DrawConstruction { bridge, increments };

/// Driving noise of one trajectory: an n x d block of standard normals in
/// step-major order plus one ordering bit, all derived from a single
/// Sobol' point of dimension n*d + 1.
struct PathDraws {
    int steps = 0;
    int dim = 0;
    std::vector<double> normals;  // steps * dim, step-major
    int bernoulli = 0;
    double order_uniform = 0.0;  // raw last coordinate

    std::span<const double> step_normals(int s) const {
        return {normals.data() + static_cast<std::size_t>(s) * dim,
                static_cast<std::size_t>(dim)};
    }
};

/// Maps Sobol' point path_index + 1 (the all-zero point is skipped)
/// through the inverse normal CDF; the last coordinate, thresholded at
/// 1/2, gives the ordering bit.
PathDraws path_draws(const SobolStream& stream, std::uint64_t path_index, int steps, int dim,
                     DrawConstruction construction = DrawConstruction::bridge);

}  // namespace sns
