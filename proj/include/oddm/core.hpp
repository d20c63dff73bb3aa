// SPDX-License-Identifier: Apache-2.0
//
// Frame configuration and the delay-Doppler / time-domain sample containers
// shared by every other module.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oddm {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Invalid static parameters or mismatched container dimensions.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The channel's equivalent tap range does not fit the frame (l'_max >= M),
/// or a generated/declared tap falls outside the synchronized range.
class TapRangeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class PrefixMode { Rcp, Zp };

const char* to_string(PrefixMode mode);
PrefixMode prefix_mode_from_string(const std::string& s);

/**
 * Static frame parameters.
 *
 *   M   multicarrier symbols per frame (delay bins)
 *   N   subcarriers per multicarrier symbol (Doppler bins)
 *   fs  sample rate; Ts = 1/fs is the delay resolution
 *   fc  carrier frequency
 *   Q   pulse half-duration in samples, a(t) = 0 for |t| >= Q*Ts
 *   beta raised-cosine roll-off
 */
struct FrameConfig {
    int M = 128;
    int N = 32;
    double fs = 5e3;
    double fc = 12.5e3;
    int Q = 8;
    double beta = 0.65;
    PrefixMode prefix = PrefixMode::Rcp;

    double Ts() const { return 1.0 / fs; }
    double T() const { return M / fs; }
    int NM() const { return N * M; }
    double doppler_resolution() const { return fs / (static_cast<double>(N) * M); }
    double frame_duration() const { return static_cast<double>(N) * M / fs; }

    /// Throws ConfigError if any invariant is violated (including 2Q < M/4).
    void validate() const;
};

/// M x N delay-Doppler grid X[m,n]. Storage is row-major in m, so the flat
/// buffer is exactly the vectorization x_DD(mN + n) = X[m,n].
class DdFrame {
  public:
    DdFrame() = default;
    DdFrame(int M, int N);

    int M() const { return M_; }
    int N() const { return N_; }

    cplx& operator()(int m, int n) { return data_[index(m, n)]; }
    const cplx& operator()(int m, int n) const { return data_[index(m, n)]; }

    std::span<cplx> data() { return data_; }
    std::span<const cplx> data() const { return data_; }

    bool operator==(const DdFrame&) const = default;

  private:
    std::size_t index(int m, int n) const { return static_cast<std::size_t>(m) * N_ + n; }

    int M_ = 0;
    int N_ = 0;
    std::vector<cplx> data_;
};

std::vector<cplx> vectorize(const DdFrame& frame);
DdFrame devectorize(std::span<const cplx> v, int M, int N);

/// Time-domain samples x[m, nd] for m in [0,M), nd in [-1,N). Column nd = -1
/// is the prefix; sample (m, nd) sits at time (m + nd*M) * Ts.
class TimeSamples {
  public:
    TimeSamples() = default;
    TimeSamples(int M, int N);

    int M() const { return M_; }
    int N() const { return N_; }

    cplx& operator()(int m, int nd) { return data_[index(m, nd)]; }
    const cplx& operator()(int m, int nd) const { return data_[index(m, nd)]; }

    /// Sample at flat position p = m + nd*M, p in [-M, NM).
    const cplx& at_position(long p) const;

    double sample_instant(int m, int nd, const FrameConfig& cfg) const {
        return (m + static_cast<double>(nd) * M_) * cfg.Ts();
    }

    std::span<const cplx> data() const { return data_; }

  private:
    std::size_t index(int m, int nd) const {
        return static_cast<std::size_t>(m) * (N_ + 1) + static_cast<std::size_t>(nd + 1);
    }

    int M_ = 0;
    int N_ = 0;
    std::vector<cplx> data_;
};

/// e^{j2pi x}, with x reduced to [0,1) first so large cycle counts keep full precision.
inline cplx cis_cycles(double x) {
    double frac = x - std::floor(x);
    return std::polar(1.0, 2.0 * pi * frac);
}

inline int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

}  // namespace oddm
