// SPDX-License-Identifier: Apache-2.0

#include "oddm/ddmatrix.hpp"

#include <cmath>
#include <ostream>

#include "fft.hpp"
#include "oddm/pulse.hpp"
#include "support.hpp"

namespace oddm {

ZpRange zp_range(const ChannelRealization& ch, const FrameConfig& cfg) {
    const int M = cfg.M, N = cfg.N, Q = cfg.Q;
    const double b = ch.b_max();
    int m_min = static_cast<int>(std::ceil(Q - ch.l_min - 1 + b * ((N - 1.0) * M - 1.0)));
    if (m_min < 0) m_min = 0;
    int m_max = static_cast<int>(std::floor(M - Q - ch.l_max - b * (N - 1.0) * M));
    if (m_max < m_min) {
        throw TapRangeError("frame too short for zero padding: m_max = " + std::to_string(m_max) +
                            " < m_min = " + std::to_string(m_min));
    }
    return {m_min, m_max};
}

DdChannelMatrix::DdChannelMatrix(int taps, int M, int N, PrefixMode mode)
    : taps_(taps), M_(M), N_(N), mode_(mode) {
    if (taps < 1 || taps > M) throw ConfigError("kernel tap count must lie in [1, M]");
    slot_.assign(static_cast<std::size_t>(taps) * M, -1);
}

std::span<const cplx> DdChannelMatrix::block(int l, int m) const {
    std::int32_t s = slot_[slot_index(l, m)];
    if (s < 0) return {};
    return {pool_.data() + static_cast<std::size_t>(s) * N_, static_cast<std::size_t>(N_)};
}

std::span<cplx> DdChannelMatrix::block_for_write(int l, int m) {
    std::int32_t& s = slot_[slot_index(l, m)];
    if (s < 0) {
        s = static_cast<std::int32_t>(stored_blocks());
        pool_.resize(pool_.size() + N_);
    }
    return {pool_.data() + static_cast<std::size_t>(s) * N_, static_cast<std::size_t>(N_)};
}

cplx DdChannelMatrix::G(int l, int m, int k) const {
    auto row = block(l, m);
    return row.empty() ? cplx{} : row[k];
}

DdChannelMatrix DdChannelMatrix::with_mode(PrefixMode mode) const {
    DdChannelMatrix copy = *this;
    copy.mode_ = mode;
    return copy;
}

DdChannelMatrix build_G(const ChannelRealization& ch, const FrameConfig& cfg, KernelOptions opts) {
    const TapRange range = tap_range(ch, cfg);
    const int M = cfg.M, N = cfg.N, NM = cfg.NM();
    const NyquistPulse pulse(cfg);

    // per-path pulse geometry under the requested model
    struct PathModel {
        double l;
        double b;
        detail::TapWindow win;
        NyquistPulse::Stepper step;     // pulse increment b_i M per symbol
        std::vector<cplx> doppler_mod;  // e^{j2pi nd k_i / N}
    };
    const int shift = opts.dse || opts.keep_sync_offset
                          ? 0
                          : static_cast<int>(std::floor(ch.b_max() * (NM - 1)));
    std::vector<PathModel> models;
    models.reserve(ch.paths.size());
    for (const auto& p : ch.paths) {
        PathModel pm;
        pm.l = p.l - shift;
        pm.b = opts.dse ? p.b : 0.0;
        pm.win = detail::path_tap_window(pm.l, pm.b, cfg);
        pm.step = pulse.stepper(pm.b * M);
        pm.doppler_mod.resize(N);
        for (int nd = 0; nd < N; ++nd) pm.doppler_mod[nd] = cis_cycles(p.k * nd / N);
        models.push_back(std::move(pm));
    }

    std::vector<double> a(N);
    auto any_nonzero = [&] {
        for (double v : a)
            if (v != 0.0) return true;
        return false;
    };

    // taps the window admits outside [0, l'_max] must carry no pulse energy
    for (const auto& pm : models) {
        for (int l = pm.win.lo; l <= pm.win.hi; ++l) {
            if (l >= 0 && l <= range.max) continue;
            for (int m = 0; m < M; ++m) {
                pulse.sample_progression(l - pm.l + pm.b * m, pm.step, a);
                if (any_nonzero()) {
                    throw TapRangeError("kernel tap " + std::to_string(l) + " outside [0, " +
                                        std::to_string(range.max) + "]");
                }
            }
        }
    }

    DdChannelMatrix H(range.max + 1, M, N, cfg.prefix);
    detail::Dft dft(N, detail::Dft::Direction::Forward);
    auto buf = dft.buffer();

    for (int l = 0; l <= range.max; ++l) {
        for (int m = 0; m < M; ++m) {
            bool touched = false;
            for (std::size_t i = 0; i < models.size(); ++i) {
                const auto& pm = models[i];
                if (l < pm.win.lo || l > pm.win.hi) continue;
                pulse.sample_progression(l - pm.l + pm.b * m, pm.step, a);
                if (!any_nonzero()) continue;
                if (!touched) {
                    std::fill(buf.begin(), buf.end(), cplx{});
                    touched = true;
                }
                const auto& p = ch.paths[i];
                const cplx w = p.h * cis_cycles(p.k * m / NM) / static_cast<double>(N);
                for (int nd = 0; nd < N; ++nd) {
                    if (a[nd] != 0.0) buf[nd] += w * a[nd] * pm.doppler_mod[nd];
                }
            }
            if (!touched) continue;
            dft.run();
            auto row = H.block_for_write(l, m);
            std::copy(buf.begin(), buf.end(), row.begin());
        }
    }

    try {
        H.set_zp(zp_range(ch, cfg));
    } catch (const TapRangeError&) {
        H.set_zp(std::nullopt);
    }
    return H;
}

cplx phase_phi(int m_prime, int n_prime, int M, int N) {
    if (m_prime <= -M || m_prime >= M) {
        throw ConfigError("phi: m' = " + std::to_string(m_prime) + " outside (-M, M)");
    }
    if (m_prime >= 0) return {1.0, 0.0};
    return cis_cycles(-static_cast<double>(n_prime) / N);
}

namespace {

void check_frame(const DdChannelMatrix& H, const DdFrame& x) {
    if (x.M() != H.M() || x.N() != H.N()) {
        throw ConfigError("frame is " + std::to_string(x.M()) + "x" + std::to_string(x.N()) +
                          ", channel matrix expects " + std::to_string(H.M()) + "x" +
                          std::to_string(H.N()));
    }
}

}  // namespace

DdFrame apply_rcp(const DdChannelMatrix& H, const DdFrame& x) {
    check_frame(H, x);
    if (H.mode() != PrefixMode::Rcp) throw ConfigError("apply_rcp needs an RCP channel matrix");
    const int M = H.M(), N = H.N();

    std::vector<cplx> cp_phase(N);
    for (int n = 0; n < N; ++n) cp_phase[n] = phase_phi(-1, n, M, N);

    DdFrame y(M, N);
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < H.taps(); ++l) {
            auto G = H.block(l, m);
            if (G.empty()) continue;
            const bool wrapped = m - l < 0;
            const int src = wrap(m - l, M);
            for (int n = 0; n < N; ++n) {
                cplx acc{};
                for (int k = 0; k < N; ++k) {
                    const int nn = wrap(n - k, N);
                    const cplx xv = x(src, nn);
                    acc += wrapped ? xv * cp_phase[nn] * G[k] : xv * G[k];
                }
                y(m, n) += acc;
            }
        }
    }
    return y;
}

DdFrame apply_zp(const DdChannelMatrix& H, const DdFrame& x) {
    check_frame(H, x);
    if (H.mode() != PrefixMode::Zp) throw ConfigError("apply_zp needs a ZP channel matrix");
    if (!H.zp()) throw ConfigError("channel admits no zero-padding range");
    const int M = H.M(), N = H.N();
    const ZpRange zp = *H.zp();
    for (int m = 0; m < M; ++m) {
        if (m >= zp.m_min && m <= zp.m_max) continue;
        for (int n = 0; n < N; ++n) {
            if (x(m, n) != cplx{}) {
                throw ConfigError("frame has energy at m = " + std::to_string(m) +
                                  " outside the zero-padding range [" + std::to_string(zp.m_min) +
                                  ", " + std::to_string(zp.m_max) + "]");
            }
        }
    }

    DdFrame y(M, N);
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l <= m && l < H.taps(); ++l) {
            auto G = H.block(l, m);
            if (G.empty()) continue;
            for (int n = 0; n < N; ++n) {
                cplx acc{};
                for (int k = 0; k < N; ++k) acc += x(m - l, wrap(n - k, N)) * G[k];
                y(m, n) += acc;
            }
        }
    }
    return y;
}

double nmse(const DdChannelMatrix& H, const DdChannelMatrix& H_hat) {
    if (H.M() != H_hat.M() || H.N() != H_hat.N() || H.mode() != H_hat.mode()) {
        throw ConfigError("nmse: channel matrices differ in dimensions or mode");
    }
    const int M = H.M(), N = H.N();
    const int taps = std::max(H.taps(), H_hat.taps());
    double err = 0.0, ref = 0.0;
    for (int l = 0; l < taps; ++l) {
        for (int m = 0; m < M; ++m) {
            auto g = l < H.taps() ? H.block(l, m) : std::span<const cplx>{};
            auto gh = l < H_hat.taps() ? H_hat.block(l, m) : std::span<const cplx>{};
            if (g.empty() && gh.empty()) continue;
            for (int k = 0; k < N; ++k) {
                const cplx a = g.empty() ? cplx{} : g[k];
                const cplx b = gh.empty() ? cplx{} : gh[k];
                err += std::norm(a - b);
                ref += std::norm(a);
            }
        }
    }
    // each kernel value fills N entries of unit-modulus-scaled copies
    err *= N;
    ref *= N;
    if (!(ref > 0.0)) throw ConfigError("nmse: reference channel matrix has zero norm");
    return err / ref;
}

std::vector<cplx> to_dense(const DdChannelMatrix& H) {
    const int M = H.M(), N = H.N();
    const std::size_t NM = static_cast<std::size_t>(N) * M;
    if (NM > 4096) throw ConfigError("refusing to materialize a dense matrix with NM > 4096");
    std::vector<cplx> D(NM * NM);
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < H.taps(); ++l) {
            auto G = H.block(l, m);
            if (G.empty()) continue;
            for (int n = 0; n < N; ++n) {
                for (int k = 0; k < N; ++k) {
                    const std::size_t row = static_cast<std::size_t>(m) * N + n;
                    const std::size_t col = static_cast<std::size_t>(wrap(m - l, M)) * N + wrap(n - k, N);
                    const cplx phi = H.mode() == PrefixMode::Rcp ? phase_phi(m - l, n - k, M, N) : cplx{1.0};
                    // ZP frames have no wrapped contribution
                    if (H.mode() == PrefixMode::Zp && m - l < 0) continue;
                    D[row * NM + col] += phi * G[k];
                }
            }
        }
    }
    return D;
}

void write_kernel_csv(const DdChannelMatrix& H, std::ostream& out) {
    out << "l,m,k,re,im,mag_db\n";
    char line[160];
    for (int l = 0; l < H.taps(); ++l) {
        for (int m = 0; m < H.M(); ++m) {
            auto G = H.block(l, m);
            if (G.empty()) continue;
            for (int k = 0; k < H.N(); ++k) {
                const double mag = std::abs(G[k]);
                const double db = 20.0 * std::log10(std::max(mag, 1e-20));
                std::snprintf(line, sizeof line, "%d,%d,%d,%.17g,%.17g,%.6f\n", l, m, k, G[k].real(),
                              G[k].imag(), db);
                out << line;
            }
        }
    }
}

}  // namespace oddm
