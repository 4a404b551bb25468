#pragma once

#include <span>

namespace sns {

/// Fixed-order recursive pairwise sum; the result depends only on the
/// element order, never on how the values were produced.
double pairwise_sum(std::span<const double> v);

}  // namespace sns
