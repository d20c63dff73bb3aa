// SPDX-License-Identifier: Apache-2.0
//
// ODDM transmitter and receiver: per-symbol normalized N-point transforms
// between the delay-Doppler grid and the staggered time samples, prefix
// handling, and exact evaluation of the pulse-shaped waveform.

#pragma once

#include "oddm/core.hpp"

namespace oddm {

/// x[m,nd] = N^{-1/2} sum_n X[m,n] e^{j2pi n nd/N}; column -1 filled per cfg.prefix
/// (RCP: copy of column N-1, ZP: zeros).
TimeSamples dd_to_time(const DdFrame& frame, const FrameConfig& cfg);

/// Y[m,n] = N^{-1/2} sum_{nd=0}^{N-1} y[m,nd] e^{-j2pi n nd/N}. The prefix column is ignored.
DdFrame time_to_dd(const TimeSamples& samples, const FrameConfig& cfg);

/// s(t) = sum_m sum_{nd=-1}^{N-1} x[m,nd] a(t - m Ts - nd T), t in seconds.
/// Only the pulses whose support covers t are visited.
cplx synthesize(double t, const TimeSamples& samples, const FrameConfig& cfg);

}  // namespace oddm
