// SPDX-License-Identifier: Apache-2.0

#include "oddm/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace oddm {

namespace {

// 3GPP TR 38.901 Table 7.7.2-3, TDL-C
constexpr std::array<TdlTap, 24> kTdlC{{
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2219, -3.5},  {0.2329, -5.2},  {0.2176, -2.5},
    {0.6366, 0.0},   {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},
    {0.8213, -10.7}, {0.9336, -11.1}, {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},
    {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9}, {5.4902, -15.8}, {5.6077, -17.1},
    {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8},
}};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform_speed(std::mt19937_64& rng, double v_max) {
    std::uniform_real_distribution<double> angle(-pi, pi);
    return v_max * std::cos(angle(rng));
}

void normalize_power(std::vector<cplx>& h) {
    double p = 0.0;
    for (const auto& g : h) p += std::norm(g);
    if (p > 0.0) {
        double s = 1.0 / std::sqrt(p);
        for (auto& g : h) g *= s;
    }
}

}  // namespace

Path derive_path(cplx h, double tau, double v, double c, const FrameConfig& cfg) {
    if (!(c > 0.0)) throw ConfigError("wave speed must be positive");
    if (!(std::fabs(v) < c)) throw ConfigError("path speed must satisfy |v| < c");
    Path p;
    p.h = h;
    p.tau = tau;
    p.v = v;
    p.b = v / c;
    p.nu = p.b * cfg.fc;
    p.l = tau * cfg.fs;
    p.k = p.nu * cfg.NM() * cfg.Ts();
    return p;
}

int sync_offset(double v_max, double c, const FrameConfig& cfg) {
    return cfg.Q + static_cast<int>(std::floor(v_max / c * (cfg.NM() - 1)));
}

ChannelRealization make_realization(std::vector<Path> paths, double c, double v_max,
                                    const FrameConfig& cfg, std::uint64_t seed,
                                    std::optional<int> l_min) {
    cfg.validate();
    if (paths.empty()) throw ConfigError("channel needs at least one path");
    if (!(c > 0.0)) throw ConfigError("wave speed must be positive");
    if (!(v_max >= 0.0 && v_max < c)) throw ConfigError("v_max must lie in [0, c)");

    double lo = paths.front().l, hi = paths.front().l;
    for (const auto& p : paths) {
        if (std::fabs(p.v) > v_max * (1.0 + 1e-12)) {
            throw ConfigError("path speed exceeds v_max");
        }
        lo = std::min(lo, p.l);
        hi = std::max(hi, p.l);
    }

    ChannelRealization ch;
    ch.paths = std::move(paths);
    ch.c = c;
    ch.v_max = v_max;
    ch.seed = seed;
    ch.l_min = l_min ? *l_min : static_cast<int>(std::floor(lo));
    ch.l_max = static_cast<int>(std::ceil(hi));
    if (ch.l_min > lo) throw ConfigError("timing reference lies after the earliest path");
    tap_range(ch, cfg);
    return ch;
}

TapRange tap_range(const ChannelRealization& ch, const FrameConfig& cfg) {
    const double spread = ch.b_max() * (cfg.NM() - 1);
    TapRange r{static_cast<int>(std::ceil(ch.l_min - cfg.Q - spread)),
               static_cast<int>(std::floor(ch.l_max + cfg.Q + spread))};
    if (r.max >= cfg.M) {
        throw TapRangeError("equivalent tap range reaches l'_max = " + std::to_string(r.max) +
                            " >= M = " + std::to_string(cfg.M));
    }
    return r;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

std::span<const TdlTap> tdlc_profile() { return kTdlC; }

ChannelRealization gen_tdlc(double delay_spread, double v_max, double c, std::uint64_t seed,
                            const FrameConfig& cfg) {
    if (!(delay_spread > 0.0)) throw ConfigError("delay spread must be positive");
    cfg.validate();
    std::mt19937_64 rng(derive_seed(seed, 0x7d1c));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int sync = sync_offset(v_max, c, cfg);
    std::vector<cplx> h;
    h.reserve(kTdlC.size());
    for (const auto& tap : kTdlC) {
        double sigma = std::sqrt(0.5 * std::pow(10.0, tap.power_db / 10.0));
        double re = gauss(rng);
        double im = gauss(rng);
        h.emplace_back(sigma * re, sigma * im);
    }
    normalize_power(h);

    std::vector<Path> paths;
    paths.reserve(kTdlC.size());
    for (std::size_t i = 0; i < kTdlC.size(); ++i) {
        double tau = sync * cfg.Ts() + kTdlC[i].normalized_delay * delay_spread;
        paths.push_back(derive_path(h[i], tau, uniform_speed(rng, v_max), c, cfg));
    }
    return make_realization(std::move(paths), c, v_max, cfg, seed, sync);
}

UwaDraw gen_uwa(double v_max, double c, std::uint64_t seed, const FrameConfig& cfg,
                const UwaParams& params) {
    cfg.validate();
    if (params.paths < 1) throw ConfigError("UWA channel needs at least one path");
    std::mt19937_64 rng(derive_seed(seed, 0x0a3a));
    std::exponential_distribution<double> arrival(1.0 / params.mean_interarrival);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int sync = sync_offset(v_max, c, cfg);
    const double decay_per_s = params.decay_db / 10.0 / params.decay_span;

    UwaDraw draw;
    for (int attempt = 0; attempt <= params.max_redraws; ++attempt) {
        std::vector<double> excess(params.paths);
        double t = 0.0;
        for (auto& e : excess) {
            t += arrival(rng);
            e = t;
        }
        std::vector<cplx> h(params.paths);
        for (int i = 0; i < params.paths; ++i) {
            double sigma = std::sqrt(0.5 * std::pow(10.0, -decay_per_s * excess[i]));
            double re = gauss(rng);
            double im = gauss(rng);
            h[i] = {sigma * re, sigma * im};
        }
        normalize_power(h);

        std::vector<Path> paths;
        paths.reserve(params.paths);
        for (int i = 0; i < params.paths; ++i) {
            double tau = sync * cfg.Ts() + excess[i];
            paths.push_back(derive_path(h[i], tau, uniform_speed(rng, v_max), c, cfg));
        }
        try {
            draw.channel = make_realization(std::move(paths), c, v_max, cfg, seed, sync);
            return draw;
        } catch (const TapRangeError&) {
            ++draw.rejected;
        }
    }
    throw TapRangeError("UWA generator exceeded " + std::to_string(params.max_redraws) +
                        " redraws; frame too short for the delay profile");
}

cplx freq_response(const ChannelRealization& ch, double t, double f) {
    cplx acc{};
    for (const auto& p : ch.paths) {
        double cycles = -f * p.tau + p.nu * t + p.b * f * t;
        acc += p.h * cis_cycles(cycles);
    }
    return acc;
}

nlohmann::json to_json(const ChannelRealization& ch) {
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& p : ch.paths) {
        paths.push_back({{"h_re", p.h.real()}, {"h_im", p.h.imag()}, {"tau_s", p.tau}, {"v_mps", p.v}});
    }
    return {{"c", ch.c}, {"v_max", ch.v_max}, {"seed", ch.seed}, {"l_min", ch.l_min}, {"paths", paths}};
}

ChannelRealization channel_from_json(const nlohmann::json& j, const FrameConfig& cfg) {
    const double c = j.at("c").get<double>();
    std::vector<Path> paths;
    for (const auto& p : j.at("paths")) {
        cplx h{p.at("h_re").get<double>(), p.at("h_im").get<double>()};
        paths.push_back(derive_path(h, p.at("tau_s").get<double>(), p.at("v_mps").get<double>(), c, cfg));
    }
    std::optional<int> l_min;
    if (j.contains("l_min")) l_min = j.at("l_min").get<int>();
    return make_realization(std::move(paths), c, j.at("v_max").get<double>(), cfg,
                            j.value("seed", std::uint64_t{0}), l_min);
}

}  // namespace oddm
