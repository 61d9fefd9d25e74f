#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace ebrisk::detail {

// Nudge one weight until the plain left-to-right sum of w is exactly 1.0.
//
// Dividing each weight by the computed total rounds every quotient
// separately, so the re-summed total typically lands a few ulps off 1. The
// plain sum is nondecreasing in any single weight, so an ulp-walk on one
// slot usually reaches 1.0 exactly; but rounding in the partial sums after
// that slot quantises the reachable totals, and for some inputs the grid
// reachable from one slot skips over 1.0. Every slot at or before a given
// position steers the same rounded partial sum, so when that happens only a
// slot *further along* can change the outcome: candidates are tried walking
// outward from idx, up to max_offset away. Callers bound max_offset so every
// candidate slot still carries a weight large enough (and a node small
// enough, for quadrature rules) that a few-ulp nudge is harmless; slots that
// fail to land are restored before the next candidate is tried.
inline void pin_unit_sum(std::vector<double>& w, std::size_t idx, std::ptrdiff_t max_offset) {
    const auto plain_sum = [&w]() {
        double s = 0.0;
        for (double x : w) s += x;
        return s;
    };
    if (plain_sum() == 1.0) return;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::ptrdiff_t>(w.size());
    for (std::ptrdiff_t k = 0; k <= 2 * max_offset; ++k) {
        // 0, +1, -1, +2, -2, ...
        const std::ptrdiff_t offset = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx) + offset;
        if (j < 0 || j >= n) continue;
        const double saved = w[static_cast<std::size_t>(j)];
        double& slot = w[static_cast<std::size_t>(j)];
        double s = plain_sum();
        slot += 1.0 - s;
        s = plain_sum();
        for (int step = 0; step < 64 && s != 1.0; ++step) {
            slot = std::nextafter(slot, s < 1.0 ? kInf : -kInf);
            s = plain_sum();
        }
        if (s == 1.0) return;
        slot = saved;
    }
    // No candidate slot lands exactly on 1; keep the one-shot correction on
    // the preferred slot as a best effort.
    w[idx] += 1.0 - plain_sum();
}

}  // namespace ebrisk::detail
