// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oddm/core.hpp"
#include "oddm/pulse.hpp"
#include "oracles.hpp"

using namespace oddm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("frame config derived quantities", "[core]") {
    FrameConfig cfg;  // 32 x 128 at 5 kHz
    CHECK_THAT(cfg.Ts(), WithinRel(2e-4, 1e-15));
    CHECK_THAT(cfg.T(), WithinRel(128 / 5e3, 1e-15));
    CHECK(cfg.NM() == 4096);
    CHECK_THAT(cfg.doppler_resolution(), WithinRel(5e3 / 4096, 1e-15));
    CHECK_THAT(cfg.frame_duration(), WithinRel(4096 / 5e3, 1e-15));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("frame config rejects bad parameters", "[core]") {
    auto bad = [](auto mutate) {
        FrameConfig cfg;
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.M = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.N = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.fs = -1.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.beta = 1.5; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.Q = 0; }).validate(), ConfigError);
    // 2Q must stay below M/4
    CHECK_THROWS_AS(bad([](FrameConfig& c) { c.Q = 16; }).validate(), ConfigError);
    CHECK_NOTHROW(bad([](FrameConfig& c) { c.Q = 15; }).validate());
}

TEST_CASE("prefix mode names", "[core]") {
    CHECK(prefix_mode_from_string("rcp") == PrefixMode::Rcp);
    CHECK(prefix_mode_from_string("zp") == PrefixMode::Zp);
    CHECK(std::string(to_string(PrefixMode::Zp)) == "zp");
    CHECK_THROWS_AS(prefix_mode_from_string("cp"), ConfigError);
}

TEST_CASE("vectorization is row-major in delay", "[core]") {
    DdFrame X(3, 4);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 4; ++n) X(m, n) = {double(m), double(n)};
    const auto v = vectorize(X);
    REQUIRE(v.size() == 12);
    CHECK(v[2 * 4 + 1] == cplx(2.0, 1.0));
    CHECK(devectorize(v, 3, 4) == X);
    CHECK_THROWS_AS(devectorize(v, 4, 4), ConfigError);
}

TEST_CASE("time samples address the prefix column", "[core]") {
    TimeSamples s(4, 3);
    s(2, -1) = 7.0;
    s(1, 2) = 5.0;
    CHECK(s.at_position(-2) == cplx(7.0));  // m = 2, nd = -1
    CHECK(s.at_position(1 + 2 * 4) == cplx(5.0));
    FrameConfig cfg;
    cfg.M = 4;
    cfg.N = 3;
    CHECK_THAT(s.sample_instant(1, 2, cfg), WithinRel(9.0 / cfg.fs, 1e-15));
}

TEST_CASE("cis_cycles keeps precision for large cycle counts", "[core]") {
    CHECK_THAT(std::abs(cis_cycles(1e9 + 0.25) - cplx(0.0, 1.0)), WithinAbs(0.0, 1e-6));
    CHECK_THAT(std::abs(cis_cycles(-0.5) - cplx(-1.0, 0.0)), WithinAbs(0.0, 1e-15));
    CHECK(wrap(-1, 5) == 4);
    CHECK(wrap(7, 5) == 2);
}

// ---------------------------------------------------------------------------

TEST_CASE("sinpi has exact integer zeros and odd symmetry", "[pulse]") {
    for (int n = -20; n <= 20; ++n) CHECK(sinpi(n) == 0.0);
    CHECK(sinpi(0.5) == 1.0);
    CHECK(sinpi(-1.5) == 1.0);
    for (double x : {0.1, 0.37, 1.9, 12.3}) CHECK(sinpi(-x) == -sinpi(x));
}

TEST_CASE("pulse is even, Nyquist and compactly supported", "[pulse]") {
    for (double beta : {0.0, 0.1, 0.65, 1.0}) {
        for (int Q : {1, 4, 8}) {
            NyquistPulse a(beta, Q);
            CHECK(a(0.0) == 1.0);
            for (int n = 1; n < Q + 3; ++n) {
                CHECK(a(n) == 0.0);
                CHECK(a(-n) == 0.0);
            }
            std::mt19937_64 rng(17);
            std::uniform_real_distribution<double> u(-Q - 2.0, Q + 2.0);
            for (int i = 0; i < 500; ++i) {
                const double x = u(rng);
                CHECK(a(x) == a(-x));
                if (std::fabs(x) >= Q) CHECK(a(x) == 0.0);
            }
            CHECK(a(Q) == 0.0);
            CHECK_THAT(a(std::nextafter(double(Q), 0.0)), WithinAbs(0.0, 1e-14));
        }
    }
}

TEST_CASE("pulse matches the textbook raised cosine", "[pulse]") {
    for (double beta : {0.1, 0.65}) {
        NyquistPulse a(beta, 8);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-8.0, 8.0);
        for (int i = 0; i < 2000; ++i) {
            const double x = u(rng);
            CHECK_THAT(a(x), WithinAbs(oracle::rc_textbook(x, beta, 8), 1e-13));
        }
    }
}

TEST_CASE("pulse is continuous through the removable singularity", "[pulse]") {
    for (double beta : {0.1, 0.25, 0.65, 1.0}) {
        NyquistPulse a(beta, 8);
        const double xs = 0.5 / beta;
        if (xs >= 8.0) continue;
        // two-sided numeric limit
        const double h = 1e-7;
        const double limit = 0.5 * (oracle::rc_textbook(xs - h, beta, 8) + oracle::rc_textbook(xs + h, beta, 8));
        CHECK_THAT(a(xs), WithinAbs(limit, 1e-9));
        CHECK_THAT(a(xs), WithinAbs(pi / 4.0 * std::sin(pi * xs) / (pi * xs), 1e-15));
        for (double e : {1e-6, 1e-9, 1e-12}) {
            CHECK_THAT(a(xs + e), WithinAbs(a(xs), 1e-5));
            CHECK_THAT(a(xs - e), WithinAbs(a(xs), 1e-5));
        }
    }
}

TEST_CASE("sample progression agrees with pointwise evaluation", "[pulse]") {
    for (double beta : {0.0, 0.1, 0.65}) {
        NyquistPulse a(beta, 8);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> x0d(-10.0, 10.0), dxd(-0.3, 0.3);
        std::vector<double> out(64);
        for (int trial = 0; trial < 200; ++trial) {
            const double x0 = x0d(rng), dx = dxd(rng);
            a.sample_progression(x0, dx, out);
            for (int n = 0; n < 64; ++n) CHECK_THAT(out[n], WithinAbs(a(x0 + dx * n), 1e-13));
        }
        // the guarded neighbourhoods of x = 0 and x = 1/(2 beta)
        a.sample_progression(-1e-4, 1e-5, out);
        for (int n = 0; n < 64; ++n) CHECK_THAT(out[n], WithinAbs(a(-1e-4 + 1e-5 * n), 1e-15));
        a.sample_progression(5.0, 0.0, out);
        for (double v : out) CHECK(v == 0.0);
    }
}

TEST_CASE("pulse rejects bad parameters", "[pulse]") {
    CHECK_THROWS_AS(NyquistPulse(-0.1, 4), ConfigError);
    CHECK_THROWS_AS(NyquistPulse(1.1, 4), ConfigError);
    CHECK_THROWS_AS(NyquistPulse(0.5, 0), ConfigError);
}

TEST_CASE("pulse_eval works in seconds", "[pulse]") {
    FrameConfig cfg;
    CHECK(pulse_eval(0.0, cfg) == 1.0);
    CHECK_THAT(pulse_eval(3 * cfg.Ts(), cfg), WithinAbs(0.0, 1e-15));
    CHECK_THAT(pulse_eval(0.3 * cfg.Ts(), cfg), WithinAbs(oracle::rc_textbook(0.3, cfg.beta, cfg.Q), 1e-14));
}
