// SPDX-License-Identifier: Apache-2.0

#include "oddm/core.hpp"

#include <cmath>

namespace oddm {

const char* to_string(PrefixMode mode) {
    return mode == PrefixMode::Rcp ? "rcp" : "zp";
}

PrefixMode prefix_mode_from_string(const std::string& s) {
    if (s == "rcp" || s == "RCP") return PrefixMode::Rcp;
    if (s == "zp" || s == "ZP") return PrefixMode::Zp;
    throw ConfigError("unknown prefix mode '" + s + "'");
}

void FrameConfig::validate() const {
    if (M < 2 || N < 2) throw ConfigError("M and N must be >= 2");
    if (Q < 1) throw ConfigError("Q must be >= 1");
    if (!(fs > 0.0) || !std::isfinite(fs)) throw ConfigError("sample rate must be positive");
    if (!(fc > 0.0) || !std::isfinite(fc)) throw ConfigError("carrier frequency must be positive");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("roll-off must lie in [0,1]");
    // 2Q must be small against M for the single-column prefix framing to hold
    if (!(8 * Q < M)) {
        throw ConfigError("pulse too long for frame: need 2Q < M/4 (Q=" + std::to_string(Q) +
                          ", M=" + std::to_string(M) + ")");
    }
}

DdFrame::DdFrame(int M, int N) : M_(M), N_(N) {
    if (M < 1 || N < 1) throw ConfigError("frame dimensions must be positive");
    data_.assign(static_cast<std::size_t>(M) * N, cplx{});
}

std::vector<cplx> vectorize(const DdFrame& frame) {
    auto d = frame.data();
    return {d.begin(), d.end()};
}

DdFrame devectorize(std::span<const cplx> v, int M, int N) {
    DdFrame frame(M, N);
    if (v.size() != static_cast<std::size_t>(M) * N) {
        throw ConfigError("vector length " + std::to_string(v.size()) + " does not match " +
                          std::to_string(M) + "x" + std::to_string(N) + " frame");
    }
    std::copy(v.begin(), v.end(), frame.data().begin());
    return frame;
}

TimeSamples::TimeSamples(int M, int N) : M_(M), N_(N) {
    if (M < 1 || N < 1) throw ConfigError("sample grid dimensions must be positive");
    data_.assign(static_cast<std::size_t>(M) * (N + 1), cplx{});
}

const cplx& TimeSamples::at_position(long p) const {
    long nd = p >= 0 ? p / M_ : -((-p + M_ - 1) / M_);
    long m = p - nd * M_;
    return data_[index(static_cast<int>(m), static_cast<int>(nd))];
}

}  // namespace oddm
