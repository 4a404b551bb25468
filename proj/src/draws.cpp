#include "sns/draws.hpp"

#include <cmath>
#include <stdexcept>

#include "sns/normal.hpp"

namespace sns {

namespace {

// Bisection schedule over the step grid 0..n: block 0 is the endpoint,
// blocks 1..n-1 are midpoints in breadth-first order.
struct BridgePlan {
    struct Node {
        int left, mid, right;
    };
    std::vector<Node> nodes;

    explicit BridgePlan(int n) {
        std::vector<std::pair<int, int>> queue{{0, n}};
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const auto [a, b] = queue[q];
            if (b - a < 2) continue;
            const int mid = (a + b) / 2;
            nodes.push_back({a, mid, b});
            queue.emplace_back(a, mid);
            queue.emplace_back(mid, b);
        }
    }
};

}  // namespace

PathDraws path_draws(const SobolStream& stream, std::uint64_t path_index, int steps, int dim,
                     DrawConstruction construction) {
    const int want = steps * dim + 1;
    if (stream.dimension() != want)
        throw std::invalid_argument("path_draws: stream dimension " +
                                    std::to_string(stream.dimension()) + " != n*d+1 = " +
                                    std::to_string(want));
    std::vector<double> u(static_cast<std::size_t>(want));
    stream.point(path_index + 1, u);

    PathDraws out;
    out.steps = steps;
    out.dim = dim;
    out.normals.resize(static_cast<std::size_t>(steps) * dim);
    out.order_uniform = u.back();
    out.bernoulli = (u.back() >= 0.5) ? 1 : 0;

    if (construction == DrawConstruction::increments) {
        for (std::size_t i = 0; i < out.normals.size(); ++i)
            out.normals[i] = inverse_normal_cdf(u[i]);
        return out;
    }

    // Brownian bridge per channel on the unit-step grid: W(steps) from
    // block 0, midpoints conditioned on their bracket, then standardized
    // increments.  The per-level blocks interleave the d channels, so
    // coordinate p*d + j drives bisection block p of channel j.
    const BridgePlan plan(steps);
    std::vector<double> w(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j < dim; ++j) {
        w[0] = 0.0;
        w[steps] = std::sqrt(static_cast<double>(steps)) * inverse_normal_cdf(u[j]);
        int block = 1;
        for (const auto& node : plan.nodes) {
            const double ta = node.left, tm = node.mid, tb = node.right;
            const double z = inverse_normal_cdf(u[static_cast<std::size_t>(block) * dim + j]);
            const double mean = ((tb - tm) * w[node.left] + (tm - ta) * w[node.right]) / (tb - ta);
            const double sd = std::sqrt((tm - ta) * (tb - tm) / (tb - ta));
            w[node.mid] = mean + sd * z;
            ++block;
        }
        for (int s = 0; s < steps; ++s)
            out.normals[static_cast<std::size_t>(s) * dim + j] = w[s + 1] - w[s];
    }
    return out;
}

}  // namespace sns
