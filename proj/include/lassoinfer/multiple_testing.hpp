#pragma once

#include <vector>

namespace lassoinfer {

struct AdjustedPValues {
    std::vector<double> raw;
    std::vector<double> adjusted;
    std::vector<int> order;  // positions sorted ascending by raw p (stable)
};

// Holm step-down adjustment: sort ascending and take the running maximum of
// min(1, (m - l + 1) * p_(l)). Ties keep their original order.
AdjustedPValues holm_adjust(const std::vector<double>& pvals);

// Indices with adjusted p-value <= alpha.
std::vector<int> reject_at(const AdjustedPValues& adj, double alpha);

}  // namespace lassoinfer
