// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the tap-domain and DD-domain builders.

#pragma once

#include <algorithm>
#include <cmath>

#include "oddm/channel.hpp"

namespace oddm::detail {

/// Taps l for which a(l - l_i + b_i t) can be nonzero for some t in [0, NM-1],
/// given the path delay l_i (may differ from p.l for shifted baselines).
struct TapWindow {
    int lo;
    int hi;
};

inline TapWindow path_tap_window(double l_i, double b, const FrameConfig& cfg) {
    const double drift = b * (cfg.NM() - 1);
    const double s_lo = std::min(0.0, drift);
    const double s_hi = std::max(0.0, drift);
    return {static_cast<int>(std::floor(l_i - cfg.Q - s_hi)),
            static_cast<int>(std::ceil(l_i + cfg.Q - s_lo))};
}

}  // namespace oddm::detail
