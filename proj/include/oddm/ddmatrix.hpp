// SPDX-License-Identifier: Apache-2.0
//
// Delay-Doppler channel matrix for wideband ODDM.
//
// The NM x NM matrix H_DD is never stored. Row mN+n, column
// N(m-l)_M + (n-k)_N holds phi[m-l, n-k] * G_l(m,k), so the kernel
// G_l(m,k) (l in [0,l'_max], m in [0,M), k in [0,N)) plus the phase rule
// determine every entry. Kernel rows (l,m) whose pulse samples are all
// zero are not stored.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "oddm/channel.hpp"
#include "oddm/core.hpp"

namespace oddm {

struct ZpRange {
    int m_min;
    int m_max;
};

/**
 * Zero-padding range that removes inter-sample interference:
 *   m_min = max(0, ceil(Q - l_min - 1 + b_max((N-1)M - 1)))
 *   m_max = floor(M - Q - l_max - b_max (N-1) M)
 * Throws TapRangeError if m_max < m_min.
 */
ZpRange zp_range(const ChannelRealization& ch, const FrameConfig& cfg);

class DdChannelMatrix {
  public:
    DdChannelMatrix() = default;
    DdChannelMatrix(int taps, int M, int N, PrefixMode mode);

    int taps() const { return taps_; }
    int M() const { return M_; }
    int N() const { return N_; }
    PrefixMode mode() const { return mode_; }

    /// Kernel row G_l(m, 0..N-1); empty span when the row is structurally zero.
    std::span<const cplx> block(int l, int m) const;
    /// Mutable row, allocated (zero-filled) on first access.
    std::span<cplx> block_for_write(int l, int m);
    cplx G(int l, int m, int k) const;

    std::size_t stored_blocks() const { return pool_.size() / static_cast<std::size_t>(N_); }

    /// ZP support attached at build time when the realization admits one.
    const std::optional<ZpRange>& zp() const { return zp_; }
    void set_zp(std::optional<ZpRange> zp) { zp_ = zp; }

    /// Same kernel, other framing.
    DdChannelMatrix with_mode(PrefixMode mode) const;

  private:
    std::size_t slot_index(int l, int m) const { return static_cast<std::size_t>(l) * M_ + m; }

    int taps_ = 0;
    int M_ = 0;
    int N_ = 0;
    PrefixMode mode_ = PrefixMode::Rcp;
    std::vector<std::int32_t> slot_;  // (l,m) -> row index into pool_, -1 if absent
    std::vector<cplx> pool_;
    std::optional<ZpRange> zp_;
};

struct KernelOptions {
    /// false: Doppler-squint-ignorant baseline, b_i = 0 inside the pulse argument.
    bool dse = true;
    /// Baseline only: false shifts every path by -floor(b_max(NM-1)) taps, i.e.
    /// the receiver synchronizes as if there were no time-variant delay.
    bool keep_sync_offset = true;
};

/**
 * G_l(m,k) = sum_i h_i e^{j2pi k_i m/(NM)} (1/N) sum_nd e^{-j2pi nd (k-k_i)/N}
 *                  a(l - l_i + b_i (m + nd M)).
 * The nd-sum is one length-N FFT per (l,m) over all paths. Mode follows cfg.prefix.
 */
DdChannelMatrix build_G(const ChannelRealization& ch, const FrameConfig& cfg, KernelOptions opts = {});

/// 1 for 0 <= m' < M, e^{-j2pi n'/N} for -M < m' < 0. Throws ConfigError otherwise.
cplx phase_phi(int m_prime, int n_prime, int M, int N);

/// Y[m,n] = sum_l sum_k X[(m-l)_M, (n-k)_N] phi[m-l, n-k] G_l(m,k).
DdFrame apply_rcp(const DdChannelMatrix& H, const DdFrame& x);

/// Y[m,n] = sum_l sum_k X[m-l, (n-k)_N] G_l(m,k), linear in delay. Throws
/// ConfigError if x has energy outside the attached ZP range.
DdFrame apply_zp(const DdChannelMatrix& H, const DdFrame& x);

/// ||H - H_hat||_F^2 / ||H||_F^2 via N * sum |G - G_hat|^2 over the kernel.
double nmse(const DdChannelMatrix& H, const DdChannelMatrix& H_hat);

/// Row-major NM x NM dense matrix. Throws ConfigError for NM > 4096.
std::vector<cplx> to_dense(const DdChannelMatrix& H);

/// CSV rows l,m,k,re,im,mag_db for every stored kernel value.
void write_kernel_csv(const DdChannelMatrix& H, std::ostream& out);

}  // namespace oddm
