// SPDX-License-Identifier: Apache-2.0
//
// Time-domain propagation through the wideband channel. propagate_exact
// evaluates the received baseband signal directly on the continuous
// waveform; tap_response/propagate_taps use the equivalent time-variant
// tapped-delay-line form. The two must agree to rounding.

#pragma once

#include <cstdint>
#include <limits>

#include "oddm/channel.hpp"
#include "oddm/core.hpp"

namespace oddm {

/// g_l(m, nd) for l in [0, l'_max], m in [0,M), nd in [0,N).
class TapResponse {
  public:
    TapResponse() = default;
    TapResponse(int taps, int M, int N);

    int taps() const { return taps_; }
    int M() const { return M_; }
    int N() const { return N_; }

    cplx& operator()(int l, int m, int nd) { return g_[index(l, m, nd)]; }
    const cplx& operator()(int l, int m, int nd) const { return g_[index(l, m, nd)]; }

  private:
    std::size_t index(int l, int m, int nd) const {
        return (static_cast<std::size_t>(l) * M_ + m) * N_ + nd;
    }

    int taps_ = 0;
    int M_ = 0;
    int N_ = 0;
    std::vector<cplx> g_;
};

/// y[m,nd] = sum_i h_i e^{j2pi nu_i t} s((1+b_i) t - tau_i), t = (m + nd M) Ts.
/// Received prefix column is left zero.
TimeSamples propagate_exact(const TimeSamples& x, const ChannelRealization& ch, const FrameConfig& cfg);

/// g_l(m,nd) = sum_i h_i e^{j2pi k_i (m+nd M)/(NM)} a(l - l_i + b_i (m + nd M)).
/// Throws TapRangeError if the tap range reaches M or a nonzero tap would sit below 0.
TapResponse tap_response(const ChannelRealization& ch, const FrameConfig& cfg);

/// y[m,nd] = sum_l x[m-l, nd'] g_l(m,nd), where m-l < 0 reads the previous
/// column (nd - 1, the prefix for nd = 0) at row m-l+M.
TimeSamples propagate_taps(const TimeSamples& x, const TapResponse& g, const FrameConfig& cfg);

inline constexpr double noiseless = std::numeric_limits<double>::infinity();

/// Adds CN(0, P/10^(snr_db/10)) to the nd in [0,N) block, P = mean |x|^2 there.
/// snr_db = +inf returns the input unchanged. Throws ConfigError on zero signal power.
TimeSamples add_noise(const TimeSamples& x, double snr_db, std::uint64_t seed);

}  // namespace oddm
