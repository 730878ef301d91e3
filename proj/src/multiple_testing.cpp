#include "lassoinfer/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lassoinfer/errors.hpp"

namespace lassoinfer {

AdjustedPValues holm_adjust(const std::vector<double>& pvals) {
    const int m = static_cast<int>(pvals.size());
    if (m < 1) throw InputError("holm_adjust: need at least one p-value");
    for (int i = 0; i < m; ++i) {
        const double v = pvals[static_cast<std::size_t>(i)];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InputError("holm_adjust: p-value " + std::to_string(i + 1) +
                             " outside [0, 1]");
        }
    }

    AdjustedPValues out;
    out.raw = pvals;
    out.order.resize(static_cast<std::size_t>(m));
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](int a, int b) {
        return pvals[static_cast<std::size_t>(a)] < pvals[static_cast<std::size_t>(b)];
    });

    out.adjusted.resize(static_cast<std::size_t>(m));
    double running = 0.0;
    for (int i = 0; i < m; ++i) {
        const int idx = out.order[static_cast<std::size_t>(i)];
        const double scaled = std::min(1.0, (m - i) * pvals[static_cast<std::size_t>(idx)]);
        running = std::max(running, scaled);
        out.adjusted[static_cast<std::size_t>(idx)] = running;
    }
    return out;
}

std::vector<int> reject_at(const AdjustedPValues& adj, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("reject_at: alpha must lie in (0, 1)");
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(adj.adjusted.size()); ++i) {
        if (adj.adjusted[static_cast<std::size_t>(i)] <= alpha) out.push_back(i);
    }
    return out;
}

}  // namespace lassoinfer
