// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "oddm/ddmatrix.hpp"
#include "oddm/experiments.hpp"
#include "oddm/modem.hpp"
#include "oddm/timesim.hpp"
#include "oracles.hpp"

using namespace oddm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

FrameConfig frame(int M, int N, int Q, PrefixMode mode = PrefixMode::Rcp) {
    FrameConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.Q = Q;
    cfg.prefix = mode;
    return cfg;
}

double kernel_peak(const DdChannelMatrix& H) {
    double peak = 0.0;
    for (int l = 0; l < H.taps(); ++l)
        for (int m = 0; m < H.M(); ++m)
            for (int k = 0; k < H.N(); ++k) peak = std::max(peak, std::abs(H.G(l, m, k)));
    return peak;
}

// Single path on the sampling grid in delay and Doppler.
ChannelRealization on_grid_path(const FrameConfig& cfg, int excess, int k, double v_max_ratio) {
    const double c = 1500.0;
    const double v = k / (cfg.fc * cfg.NM() * cfg.Ts()) * c;
    const double v_max = std::max(std::fabs(v), v_max_ratio / cfg.NM() * c);
    const int sync = sync_offset(v_max, c, cfg);
    std::vector<Path> paths{oracle::grid_path({0.8, 0.6}, sync + excess, v, c, cfg)};
    return make_realization(paths, c, v_max, cfg, 0, sync);
}

}  // namespace

TEST_CASE("kernel matches its defining double sum", "[ddmatrix]") {
    int seed = 0;
    for (auto [M, N, Q] : {std::tuple{32, 8, 3}, std::tuple{64, 16, 4}}) {
        for (double squint : {0.0, 0.9, 2.0}) {
            const auto cfg = frame(M, N, Q);
            const auto ch = random_offgrid_channel(cfg, 1500.0, 3, squint, 5.0, 40 + seed++);
            for (bool dse : {true, false}) {
                const auto H = build_G(ch, cfg, {.dse = dse});
                const double peak = kernel_peak(H);
                double err = 0.0;
                for (int l = 0; l < H.taps(); ++l)
                    for (int m = 0; m < M; ++m)
                        for (int k = 0; k < N; ++k)
                            err = std::max(err, std::abs(H.G(l, m, k) - oracle::naive_kernel(ch, cfg, l, m, k, dse)));
                CHECK(err / peak <= 1e-12);
            }
        }
    }
}

TEST_CASE("banded products equal the dense matrix", "[ddmatrix]") {
    for (auto mode : {PrefixMode::Rcp, PrefixMode::Zp}) {
        const auto cfg = frame(32, 8, 3, mode);
        const auto ch = random_offgrid_channel(cfg, 1500.0, 4, 1.3, 4.0, 6);
        const auto H = build_G(ch, cfg);
        REQUIRE(H.zp());
        const auto D = to_dense(H);
        const auto zp = *H.zp();
        const auto X = random_frame(32, 8, 3, mode == PrefixMode::Zp ? &zp : nullptr);
        const auto ref = oracle::dense_matvec(D, X.data());
        const auto Y = mode == PrefixMode::Rcp ? apply_rcp(H, X) : apply_zp(H, X);
        CHECK(max_rel_error(Y.data(), ref) <= 1e-12);
    }
}

TEST_CASE("RCP relation equals the time-domain chain", "[ddmatrix]") {
    int seed = 0;
    for (auto [M, N, Q] : {std::tuple{16, 8, 1}, std::tuple{32, 16, 3}, std::tuple{64, 8, 7}}) {
        for (int P : {1, 3, 5}) {
            const auto cfg = frame(M, N, Q);
            const auto ch = random_offgrid_channel(cfg, 1500.0, P, 2.0, std::min(6.0, M / 4.0), 70 + seed++);
            const auto X = random_frame(M, N, seed);
            const auto ref = time_to_dd(propagate_exact(dd_to_time(X, cfg), ch, cfg), cfg);
            CHECK(max_rel_error(apply_rcp(build_G(ch, cfg), X).data(), ref.data()) <= 1e-9);
        }
    }
}

TEST_CASE("kernel NMSE equals the dense Frobenius ratio", "[ddmatrix]") {
    const auto cfg = frame(16, 8, 1);
    for (int seed = 0; seed < 5; ++seed) {
        const auto ch = random_offgrid_channel(cfg, 1500.0, 3, 1.0 + seed * 0.25, 4.0, 300 + seed);
        const auto H = build_G(ch, cfg);
        const auto H_hat = build_G(ch, cfg, {.dse = false});
        const auto A = to_dense(H), B = to_dense(H_hat);
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) {
            err += std::norm(A[i] - B[i]);
            ref += std::norm(A[i]);
        }
        CHECK_THAT(nmse(H, H_hat), WithinRel(err / ref, 1e-12));
    }
}

TEST_CASE("phase rule", "[ddmatrix]") {
    CHECK(phase_phi(0, 3, 16, 8) == cplx(1.0, 0.0));
    CHECK(phase_phi(15, 3, 16, 8) == cplx(1.0, 0.0));
    CHECK_THAT(std::abs(phase_phi(-1, 2, 16, 8) - cplx(0.0, -1.0)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(phase_phi(-15, 1, 16, 8) - oracle::expj(-2.0 * pi / 8)), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(phase_phi(16, 0, 16, 8), ConfigError);
    CHECK_THROWS_AS(phase_phi(-16, 0, 16, 8), ConfigError);
}

TEST_CASE("narrowband kernel factorizes", "[ddmatrix]") {
    // with b_i dropped from the pulse, G_l(m,k) of one path is
    // h e^{j2pi k_i m/NM} a(l - l_i) D_N(k - k_i)
    const auto cfg = frame(64, 16, 4);
    for (double squint : {0.5, 2.0}) {
        auto ch = random_offgrid_channel(cfg, 1500.0, 1, squint, 6.0, 11);
        const auto& p = ch.paths[0];
        const auto H = build_G(ch, cfg, {.dse = false});
        for (int l = 0; l < H.taps(); ++l)
            for (int m = 0; m < 64; m += 7)
                for (int k = 0; k < 16; ++k) {
                    const cplx want = p.h * oracle::expj(2.0 * pi * p.k * m / cfg.NM()) *
                                      oracle::rc_textbook(l - p.l, cfg.beta, cfg.Q) *
                                      oracle::dirichlet_sum(k - p.k, 16);
                    CHECK_THAT(std::abs(H.G(l, m, k) - want), WithinAbs(0.0, 1e-13));
                    CHECK_THAT(std::abs(H.G(l, m, k)),
                               WithinAbs(std::fabs(oracle::rc_textbook(l - p.l, cfg.beta, cfg.Q)) * std::abs(p.h) *
                                             oracle::dirichlet_mag(k - p.k, 16),
                                         1e-13));
                }
    }
}

TEST_CASE("on-grid path loses sparsity under squint", "[ddmatrix]") {
    const auto cfg = frame(64, 16, 4);
    const auto ch = on_grid_path(cfg, 5, 2, 0.0);
    const auto& p = ch.paths[0];
    REQUIRE_THAT(p.k, WithinAbs(2.0, 1e-12));
    REQUIRE(p.l == std::nearbyint(p.l));

    const auto off = build_G(ch, cfg, {.dse = false});
    int significant_off = 0;
    for (int l = 0; l < off.taps(); ++l)
        for (int m = 0; m < 64; ++m)
            for (int k = 0; k < 16; ++k) {
                const double g = std::abs(off.G(l, m, k));
                if (l == std::lround(p.l) && k == 2) {
                    CHECK_THAT(g, WithinAbs(1.0, 1e-12));
                } else {
                    CHECK(g <= 1e-12);
                }
                if (g > 1e-6) ++significant_off;
            }
    CHECK(significant_off == 64);  // one entry per delay bin

    const auto on = build_G(ch, cfg, {.dse = true});
    int significant_on = 0;
    for (int l = 0; l < on.taps(); ++l)
        for (int m = 0; m < 64; ++m)
            for (int k = 0; k < 16; ++k)
                if (std::abs(on.G(l, m, k)) > 1e-6) ++significant_on;
    CHECK(significant_on > 2 * 64);
}

TEST_CASE("baseline timing can drop the squint sync offset", "[ddmatrix]") {
    const auto cfg = frame(64, 16, 4);
    const auto ch = random_offgrid_channel(cfg, 1500.0, 3, 2.5, 5.0, 8);
    const int shift = static_cast<int>(std::floor(ch.b_max() * (cfg.NM() - 1)));
    REQUIRE(shift == 2);
    const auto keep = build_G(ch, cfg, {.dse = false, .keep_sync_offset = true});
    const auto drop = build_G(ch, cfg, {.dse = false, .keep_sync_offset = false});
    for (int l = 0; l + shift < keep.taps(); ++l)
        for (int m = 0; m < 64; ++m)
            for (int k = 0; k < 16; ++k)
                CHECK_THAT(std::abs(drop.G(l, m, k) - keep.G(l + shift, m, k)), WithinAbs(0.0, 1e-14));
    // the squint-aware kernel ignores the flag
    const auto a = build_G(ch, cfg, {.dse = true, .keep_sync_offset = false});
    const auto b = build_G(ch, cfg, {.dse = true, .keep_sync_offset = true});
    CHECK(nmse(a, b) == 0.0);
}

TEST_CASE("zero-padding range for the underwater impulse setup", "[ddmatrix][zp]") {
    const auto cfg = frame(128, 32, 8);
    std::vector<Path> paths{derive_path({1.0, 0.0}, 16.5 * cfg.Ts(), knot_to_mps, 1500.0, cfg)};
    const auto ch = make_realization(paths, 1500.0, knot_to_mps, cfg, 0, 9);
    const auto zp = zp_range(ch, cfg);
    CHECK(zp.m_min == 0);
    CHECK(zp.m_max == 101);
}

TEST_CASE("squint costs one ZP row for the RF frame at 750 km/h", "[ddmatrix][zp]") {
    FrameConfig cfg = frame(1024, 64, 8);
    cfg.fs = 15.36e6;
    cfg.fc = 5e9;
    cfg.beta = 0.1;
    const double v_max = 750.0 * kmh_to_mps;
    const auto ch = gen_tdlc(300e-9, v_max, 3e8, 1, cfg);
    const double drift = ch.b_max() * (cfg.N - 1.0) * cfg.M;
    CHECK_THAT(drift, WithinAbs(0.0448, 1e-4));
    const auto zp = zp_range(ch, cfg);
    CHECK(zp.m_max == cfg.M - cfg.Q - ch.l_max - 1);
    CHECK(zp.m_min == 0);
}

TEST_CASE("ZP range removes every cross-symbol term", "[ddmatrix][zp]") {
    const auto cfg = frame(64, 8, 4, PrefixMode::Zp);
    for (int seed = 0; seed < 4; ++seed) {
        const auto ch = random_offgrid_channel(cfg, 1500.0, 3, 1.5, 6.0, 500 + seed);
        const auto zp = zp_range(ch, cfg);
        const auto scan = oracle::isi_scan(ch, cfg, zp.m_min, zp.m_max);
        CHECK(scan.cross_nonzero == 0);
        CHECK(scan.same_nonzero > 0);
    }
}

TEST_CASE("one row past the ZP bound lets a worst-case path leak", "[ddmatrix][zp]") {
    // receding path at l_max: its pulse reaches furthest into the next symbol
    const auto cfg = frame(128, 16, 8, PrefixMode::Zp);
    const double v_max = knot_to_mps;
    const int sync = sync_offset(v_max, 1500.0, cfg);
    std::vector<Path> paths{oracle::grid_path({1.0, 0.0}, sync + 6, -v_max, 1500.0, cfg)};
    const auto ch = make_realization(paths, 1500.0, v_max, cfg, 0, sync);
    REQUIRE(ch.paths[0].l == ch.l_max);
    const auto zp = zp_range(ch, cfg);
    const double bound = cfg.M - cfg.Q - ch.l_max - ch.b_max() * (cfg.N - 1.0) * cfg.M;
    const double frac = bound - zp.m_max;
    REQUIRE(frac > 0.0);
    REQUIRE(oracle::rc_textbook(cfg.Q - 1 + frac, cfg.beta, cfg.Q) != 0.0);

    CHECK(oracle::isi_scan(ch, cfg, zp.m_min, zp.m_max).cross_nonzero == 0);
    const auto leak = oracle::isi_scan(ch, cfg, zp.m_min, zp.m_max + 1);
    CHECK(leak.cross_nonzero > 0);
    CHECK(leak.cross_max > 0.0);
}

TEST_CASE("ZP and RCP relations agree on compliant frames", "[ddmatrix][zp]") {
    for (int seed = 0; seed < 4; ++seed) {
        const auto cfg = frame(64, 16, 4);
        const auto ch = random_offgrid_channel(cfg, 1500.0, 5, 2.0, 5.0, 900 + seed);
        const auto H = build_G(ch, cfg);
        REQUIRE(H.zp());
        const auto zp = *H.zp();
        const auto X = random_frame(64, 16, seed, &zp);
        const auto y_rcp = apply_rcp(H, X);
        const auto y_zp = apply_zp(H.with_mode(PrefixMode::Zp), X);
        CHECK(max_rel_error(y_zp.data(), y_rcp.data()) <= 1e-12);
    }
}

TEST_CASE("ZP product enforces its preconditions", "[ddmatrix][zp]") {
    const auto cfg = frame(64, 16, 4);
    const auto ch = random_offgrid_channel(cfg, 1500.0, 2, 1.0, 5.0, 1);
    const auto H = build_G(ch, cfg);
    CHECK_THROWS_AS(apply_zp(H, random_frame(64, 16, 1)), ConfigError);  // RCP matrix
    const auto Hz = H.with_mode(PrefixMode::Zp);
    CHECK_THROWS_AS(apply_zp(Hz, random_frame(64, 16, 1)), ConfigError);  // energy in the guard rows
    CHECK_THROWS_AS(apply_rcp(Hz, random_frame(64, 16, 1)), ConfigError);
    CHECK_THROWS_AS(apply_rcp(H, random_frame(32, 16, 1)), ConfigError);
}

TEST_CASE("infeasible zero padding", "[ddmatrix][zp]") {
    const auto cfg = frame(64, 16, 7);
    std::vector<Path> paths{oracle::grid_path({1.0, 0.0}, 40, 0.0, 1500.0, cfg)};
    const auto ch = make_realization(paths, 1500.0, 0.0, cfg, 0, 9);
    CHECK(zp_range(ch, cfg).m_min == 0);
    CHECK(zp_range(ch, cfg).m_max == 64 - 7 - 40);
    // spread from tap 1 to tap 56: m_min = 5 > m_max = 1
    std::vector<Path> wide{oracle::grid_path({1.0, 0.0}, 56, 0.0, 1500.0, cfg),
                           oracle::grid_path({1.0, 0.0}, 1, 0.0, 1500.0, cfg)};
    const auto ch2 = make_realization(wide, 1500.0, 0.0, cfg);
    CHECK_THROWS_AS(zp_range(ch2, cfg), TapRangeError);
    const auto H = build_G(ch2, cfg);
    CHECK_FALSE(H.zp());
}

TEST_CASE("kernel storage and CSV export", "[ddmatrix]") {
    const auto cfg = frame(32, 8, 3);
    const auto ch = random_offgrid_channel(cfg, 1500.0, 2, 0.0, 3.0, 4);
    const auto H = build_G(ch, cfg);
    CHECK(H.taps() == tap_range(ch, cfg).max + 1);
    CHECK(H.stored_blocks() < static_cast<std::size_t>(H.taps()) * 32);
    std::ostringstream out;
    write_kernel_csv(H, out);
    const std::string text = out.str();
    CHECK(text.rfind("l,m,k,re,im,mag_db\n", 0) == 0);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    CHECK(static_cast<std::size_t>(lines) == 1 + H.stored_blocks() * 8);
    std::ostringstream again;
    write_kernel_csv(build_G(ch, cfg), again);
    CHECK(again.str() == text);
}
