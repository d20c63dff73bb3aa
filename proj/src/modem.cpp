// SPDX-License-Identifier: Apache-2.0

#include "oddm/modem.hpp"

#include <cmath>

#include "fft.hpp"
#include "oddm/pulse.hpp"

namespace oddm {

namespace {

void check_dims(int M, int N, const FrameConfig& cfg, const char* what) {
    if (M != cfg.M || N != cfg.N) {
        throw ConfigError(std::string(what) + " is " + std::to_string(M) + "x" + std::to_string(N) +
                          ", frame expects " + std::to_string(cfg.M) + "x" + std::to_string(cfg.N));
    }
}

}  // namespace

TimeSamples dd_to_time(const DdFrame& frame, const FrameConfig& cfg) {
    check_dims(frame.M(), frame.N(), cfg, "DD frame");
    const int M = cfg.M, N = cfg.N;
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));

    TimeSamples x(M, N);
    detail::Dft idft(N, detail::Dft::Direction::Backward);
    auto buf = idft.buffer();
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) buf[n] = frame(m, n);
        idft.run();
        for (int nd = 0; nd < N; ++nd) x(m, nd) = buf[nd] * scale;
        x(m, -1) = cfg.prefix == PrefixMode::Rcp ? x(m, N - 1) : cplx{};
    }
    return x;
}

DdFrame time_to_dd(const TimeSamples& samples, const FrameConfig& cfg) {
    check_dims(samples.M(), samples.N(), cfg, "time samples");
    const int M = cfg.M, N = cfg.N;
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));

    DdFrame Y(M, N);
    detail::Dft dft(N, detail::Dft::Direction::Forward);
    auto buf = dft.buffer();
    for (int m = 0; m < M; ++m) {
        for (int nd = 0; nd < N; ++nd) buf[nd] = samples(m, nd);
        dft.run();
        for (int n = 0; n < N; ++n) Y(m, n) = buf[n] * scale;
    }
    return Y;
}

cplx synthesize(double t, const TimeSamples& samples, const FrameConfig& cfg) {
    const NyquistPulse pulse(cfg);
    const long M = cfg.M;
    const long first = -M;            // position of x[0,-1]
    const long last = M * cfg.N - 1;  // position of x[M-1,N-1]

    // pulse at flat position p is centred at p*Ts; only |t/Ts - p| < Q contributes
    const double u = t * cfg.fs;
    long lo = static_cast<long>(std::floor(u)) - cfg.Q + 1;
    long hi = static_cast<long>(std::ceil(u)) + cfg.Q - 1;
    if (lo < first) lo = first;
    if (hi > last) hi = last;

    cplx acc{};
    for (long p = lo; p <= hi; ++p) {
        double w = pulse(u - static_cast<double>(p));
        if (w != 0.0) acc += samples.at_position(p) * w;
    }
    return acc;
}

}  // namespace oddm
