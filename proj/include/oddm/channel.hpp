// SPDX-License-Identifier: Apache-2.0
//
// Wideband multipath LTV channel: per-path Doppler scaling, normalized
// delay/Doppler, synchronization and tap ranges, and the statistical
// generators for the RF (TDL-C) and underwater acoustic scenarios.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "oddm/core.hpp"

namespace oddm {

inline constexpr double kmh_to_mps = 1000.0 / 3600.0;
inline constexpr double knot_to_mps = 1852.0 / 3600.0;

struct Path {
    cplx h;        // baseband gain, carrier phase e^{-j2pi fc tau} included
    double tau;    // propagation delay (s)
    double v;      // closing speed (m/s), > 0 when the path is shortening
    double b;      // Doppler scaling factor v/c
    double nu;     // Doppler shift at the carrier (Hz)
    double l;      // tau / Ts
    double k;      // nu * N * M * Ts
};

/// Throws ConfigError if c <= 0 or |v| >= c.
Path derive_path(cplx h, double tau, double v, double c, const FrameConfig& cfg);

struct TapRange {
    int min;
    int max;
};

struct ChannelRealization {
    std::vector<Path> paths;
    double c = 0.0;
    double v_max = 0.0;
    std::uint64_t seed = 0;
    int l_min = 0;  // integer delay bounds, l_min <= l_i <= l_max
    int l_max = 0;

    double b_max() const { return v_max / c; }
};

/// Q + floor(b_max (NM - 1)): the delay tap the receiver aligns to the
/// earliest path so that the equivalent channel starts at tap 0.
int sync_offset(double v_max, double c, const FrameConfig& cfg);

/**
 * Assemble a realization and check its invariants. l_max = ceil(max l_i);
 * l_min defaults to floor(min l_i) but a generator may pass its timing
 * reference explicitly (it must not exceed any l_i). Throws TapRangeError
 * when the equivalent tap range reaches M.
 */
ChannelRealization make_realization(std::vector<Path> paths, double c, double v_max,
                                    const FrameConfig& cfg, std::uint64_t seed = 0,
                                    std::optional<int> l_min = std::nullopt);

/// (ceil(l_min - Q - b_max(NM-1)), floor(l_max + Q + b_max(NM-1))).
/// Throws TapRangeError if the upper bound is >= M.
TapRange tap_range(const ChannelRealization& ch, const FrameConfig& cfg);

/// Deterministic 64-bit stream seed from a master seed and indices.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Normalized delays and powers (dB) of the TDL-C delay profile.
struct TdlTap {
    double normalized_delay;
    double power_db;
};
std::span<const TdlTap> tdlc_profile();

/// TDL-C realization with the given RMS delay spread (s).
ChannelRealization gen_tdlc(double delay_spread, double v_max, double c, std::uint64_t seed,
                            const FrameConfig& cfg);

struct UwaParams {
    int paths = 10;
    double mean_interarrival = 1e-3;  // s
    double decay_db = 20.0;           // average power drop over decay_span
    double decay_span = 10e-3;        // s
    int max_redraws = 1000;
};

struct UwaDraw {
    ChannelRealization channel;
    int rejected = 0;  // draws discarded because l'_max >= M
};

/// Exponential-decay UWA realization (Rayleigh amplitudes, exponential arrivals).
UwaDraw gen_uwa(double v_max, double c, std::uint64_t seed, const FrameConfig& cfg,
                const UwaParams& params = {});

/// H(t,f) = sum_i h_i e^{-j2pi f tau_i} e^{j2pi nu_i t} e^{j2pi b_i f t}.
cplx freq_response(const ChannelRealization& ch, double t, double f);

nlohmann::json to_json(const ChannelRealization& ch);
ChannelRealization channel_from_json(const nlohmann::json& j, const FrameConfig& cfg);

}  // namespace oddm
