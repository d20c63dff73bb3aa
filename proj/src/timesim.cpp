// SPDX-License-Identifier: Apache-2.0

#include "oddm/timesim.hpp"

#include <random>

#include "oddm/modem.hpp"
#include "oddm/pulse.hpp"
#include "support.hpp"

namespace oddm {

TapResponse::TapResponse(int taps, int M, int N) : taps_(taps), M_(M), N_(N) {
    g_.assign(static_cast<std::size_t>(taps) * M * N, cplx{});
}

TimeSamples propagate_exact(const TimeSamples& x, const ChannelRealization& ch, const FrameConfig& cfg) {
    cfg.validate();
    const int M = cfg.M, N = cfg.N;
    const double Ts = cfg.Ts();
    TimeSamples y(M, N);
    for (int nd = 0; nd < N; ++nd) {
        for (int m = 0; m < M; ++m) {
            const double t = (m + static_cast<double>(nd) * M) * Ts;
            cplx acc{};
            for (const auto& p : ch.paths) {
                acc += p.h * cis_cycles(p.nu * t) * synthesize((1.0 + p.b) * t - p.tau, x, cfg);
            }
            y(m, nd) = acc;
        }
    }
    return y;
}

TapResponse tap_response(const ChannelRealization& ch, const FrameConfig& cfg) {
    const TapRange range = tap_range(ch, cfg);
    const int M = cfg.M, N = cfg.N, NM = cfg.NM();
    const NyquistPulse pulse(cfg);
    TapResponse g(range.max + 1, M, N);

    for (const auto& p : ch.paths) {
        const auto win = detail::path_tap_window(p.l, p.b, cfg);
        for (int l = win.lo; l <= win.hi; ++l) {
            const bool stored = l >= 0 && l <= range.max;
            for (int nd = 0; nd < N; ++nd) {
                for (int m = 0; m < M; ++m) {
                    const double pos = m + static_cast<double>(nd) * M;
                    const double a = pulse(l - p.l + p.b * pos);
                    if (a == 0.0) continue;
                    if (!stored) {
                        throw TapRangeError("path at l=" + std::to_string(p.l) + " reaches tap " +
                                            std::to_string(l) + " outside [0, l'_max]");
                    }
                    g(l, m, nd) += p.h * cis_cycles(p.k * pos / NM) * a;
                }
            }
        }
    }
    return g;
}

TimeSamples propagate_taps(const TimeSamples& x, const TapResponse& g, const FrameConfig& cfg) {
    const int M = cfg.M, N = cfg.N;
    if (x.M() != M || x.N() != N || g.M() != M || g.N() != N) {
        throw ConfigError("propagate_taps: dimension mismatch");
    }
    TimeSamples y(M, N);
    for (int nd = 0; nd < N; ++nd) {
        for (int m = 0; m < M; ++m) {
            cplx acc{};
            for (int l = 0; l < g.taps(); ++l) {
                const cplx& tap = g(l, m, nd);
                if (tap == cplx{}) continue;
                // previous column for m < l; nd = 0 reads the prefix column
                const cplx& xs = m >= l ? x(m - l, nd) : x(m - l + M, nd - 1);
                acc += xs * tap;
            }
            y(m, nd) = acc;
        }
    }
    return y;
}

TimeSamples add_noise(const TimeSamples& x, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db) || snr_db == -noiseless) throw ConfigError("SNR must be finite or +inf");
    if (snr_db == noiseless) return x;

    const int M = x.M(), N = x.N();
    double power = 0.0;
    for (int m = 0; m < M; ++m) {
        for (int nd = 0; nd < N; ++nd) power += std::norm(x(m, nd));
    }
    power /= static_cast<double>(M) * N;
    if (!(power > 0.0)) throw ConfigError("cannot scale noise to a zero-power signal");

    const double sigma = std::sqrt(0.5 * power / std::pow(10.0, snr_db / 10.0));
    std::mt19937_64 rng(derive_seed(seed, 0x5eed));
    std::normal_distribution<double> gauss(0.0, sigma);

    TimeSamples y = x;
    for (int m = 0; m < M; ++m) {
        for (int nd = 0; nd < N; ++nd) {
            double re = gauss(rng);
            double im = gauss(rng);
            y(m, nd) += cplx{re, im};
        }
    }
    return y;
}

}  // namespace oddm
