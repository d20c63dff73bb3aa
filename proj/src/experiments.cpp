// SPDX-License-Identifier: Apache-2.0

#include "oddm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <thread>

#include "oddm/modem.hpp"
#include "oddm/timesim.hpp"

namespace oddm {

const char* to_string(Scenario s) { return s == Scenario::TypeI ? "type1" : "type2"; }

Scenario scenario_from_string(const std::string& s) {
    if (s == "type1" || s == "TypeI" || s == "I") return Scenario::TypeI;
    if (s == "type2" || s == "TypeII" || s == "II") return Scenario::TypeII;
    throw ConfigError("unknown scenario '" + s + "' (expected type1 or type2)");
}

ScenarioConfig default_config(Scenario s) {
    ScenarioConfig cfg;
    cfg.scenario = s;
    const std::vector<int> Ms{128, 256, 512, 1024};
    std::vector<int> Ns;
    double v_top = 0.0;
    if (s == Scenario::TypeI) {
        cfg.c = 3e8;
        cfg.frame.fc = 5e9;
        cfg.frame.fs = 15.36e6;
        cfg.frame.beta = 0.1;
        cfg.frame.N = 64;
        cfg.frame.M = 1024;
        Ns = {32, 64};
        v_top = 1000.0;  // km/h
    } else {
        cfg.c = 1500.0;
        cfg.frame.fc = 12.5e3;
        cfg.frame.fs = 5e3;
        cfg.frame.beta = 0.65;
        cfg.frame.N = 32;
        cfg.frame.M = 128;
        Ns = {16, 32};
        v_top = 5.0;  // kn
    }
    cfg.frame.Q = 8;
    for (int N : Ns)
        for (int M : Ms) cfg.nm_grid.emplace_back(N, M);
    for (int i = 7; i >= 0; --i) cfg.vmax.push_back(v_top / std::ldexp(1.0, i));
    return cfg;
}

double vmax_to_si(Scenario s, double v) { return v * (s == Scenario::TypeI ? kmh_to_mps : knot_to_mps); }

void apply_json(ScenarioConfig& cfg, const nlohmann::json& j) {
    if (j.contains("M")) cfg.frame.M = j.at("M").get<int>();
    if (j.contains("N")) cfg.frame.N = j.at("N").get<int>();
    if (j.contains("fs")) cfg.frame.fs = j.at("fs").get<double>();
    if (j.contains("fc")) cfg.frame.fc = j.at("fc").get<double>();
    if (j.contains("Q")) cfg.frame.Q = j.at("Q").get<int>();
    if (j.contains("beta")) cfg.frame.beta = j.at("beta").get<double>();
    if (j.contains("prefix")) cfg.frame.prefix = prefix_mode_from_string(j.at("prefix").get<std::string>());
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
    if (j.contains("nm_grid")) {
        cfg.nm_grid.clear();
        for (const auto& p : j.at("nm_grid")) cfg.nm_grid.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
    if (j.contains("vmax")) cfg.vmax = j.at("vmax").get<std::vector<double>>();
    if (j.contains("realizations")) cfg.realizations = j.at("realizations").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("delay_spread_ns")) cfg.delay_spread = j.at("delay_spread_ns").get<double>() * 1e-9;
    if (j.contains("uwa_paths")) cfg.uwa_paths = j.at("uwa_paths").get<int>();
    if (j.contains("baseline_sync")) {
        const auto v = j.at("baseline_sync").get<std::string>();
        if (v != "keep" && v != "drop") throw ConfigError("baseline_sync must be keep or drop");
        cfg.baseline_keep_sync = v == "keep";
    }
    if (j.contains("dse")) {
        const auto v = j.at("dse").get<std::string>();
        if (v == "on") cfg.dse = DseSelect::On;
        else if (v == "off") cfg.dse = DseSelect::Off;
        else if (v == "both") cfg.dse = DseSelect::Both;
        else throw ConfigError("dse must be on, off or both");
    }
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
}

ChannelRealization draw_channel(const ScenarioConfig& cfg, const FrameConfig& frame, double v_max_si,
                                std::uint64_t seed, int* rejected) {
    if (cfg.scenario == Scenario::TypeI) {
        if (rejected) *rejected = 0;
        return gen_tdlc(cfg.delay_spread, v_max_si, cfg.c, seed, frame);
    }
    UwaParams params;
    params.paths = cfg.uwa_paths;
    UwaDraw d = gen_uwa(v_max_si, cfg.c, seed, frame, params);
    if (rejected) *rejected = d.rejected;
    return std::move(d.channel);
}

// ---------------------------------------------------------------------------

ImpulseResult run_impulse(const ScenarioConfig& cfg) {
    const FrameConfig& frame = cfg.frame;
    frame.validate();
    const double v = cfg.impulse_speed;
    const int sync = sync_offset(std::fabs(v), cfg.c, frame);
    const double tau = sync * frame.Ts() + cfg.impulse_excess_delay;
    std::vector<Path> paths{derive_path({1.0, 0.0}, tau, v, cfg.c, frame)};

    ImpulseResult result;
    result.channel = make_realization(std::move(paths), cfg.c, std::fabs(v), frame, cfg.seed, sync);

    DdFrame x(frame.M, frame.N);
    x(0, 0) = 1.0;

    std::vector<bool> selections;
    if (cfg.dse != DseSelect::Off) selections.push_back(true);
    if (cfg.dse != DseSelect::On) selections.push_back(false);

    for (bool dse : selections) {
        KernelOptions opts;
        opts.dse = dse;
        opts.keep_sync_offset = cfg.baseline_keep_sync;
        const DdChannelMatrix H = build_G(result.channel, frame, opts).with_mode(PrefixMode::Rcp);
        const DdFrame y = apply_rcp(H, x);

        ImpulseMap map;
        map.dse = dse;
        map.taps = H.taps();
        map.N = frame.N;
        map.magnitude.resize(static_cast<std::size_t>(map.taps) * map.N);
        double peak = 0.0;
        for (int m = 0; m < map.taps; ++m)
            for (int n = 0; n < map.N; ++n) peak = std::max(peak, std::abs(y(m, n)));
        for (int m = 0; m < map.taps; ++m)
            for (int n = 0; n < map.N; ++n)
                map.magnitude[static_cast<std::size_t>(m) * map.N + n] = std::abs(y(m, n)) / peak;
        map.mag_db.resize(map.magnitude.size());
        for (std::size_t i = 0; i < map.magnitude.size(); ++i) {
            map.mag_db[i] = map.magnitude[i] > 0.0 ? std::max(20.0 * std::log10(map.magnitude[i]), -400.0) : -400.0;
        }
        result.maps.push_back(std::move(map));
    }
    return result;
}

void write_impulse_csv(const ImpulseResult& result, std::ostream& out) {
    if (result.maps.empty()) return;
    const int N = result.maps.front().N;
    out << "dse,m";
    for (int n = 0; n < N; ++n) out << ",n" << n;
    out << '\n';
    char cell[32];
    for (const auto& map : result.maps) {
        for (int m = 0; m < map.taps; ++m) {
            out << (map.dse ? "on" : "off") << ',' << m;
            for (int n = 0; n < N; ++n) {
                std::snprintf(cell, sizeof cell, ",%.6f", map.db(m, n));
                out << cell;
            }
            out << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

double realization_nmse(const ChannelRealization& ch, const FrameConfig& frame, bool keep_sync_offset) {
    const DdChannelMatrix H = build_G(ch, frame, {.dse = true, .keep_sync_offset = true});
    const DdChannelMatrix H_hat = build_G(ch, frame, {.dse = false, .keep_sync_offset = keep_sync_offset});
    return nmse(H, H_hat);
}

namespace {

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SweepRow> run_nmse_sweep(const ScenarioConfig& cfg) {
    if (cfg.realizations < 1) throw ConfigError("realizations must be >= 1");
    std::vector<SweepRow> rows;
    for (std::size_t p = 0; p < cfg.nm_grid.size(); ++p) {
        FrameConfig frame = cfg.frame;
        frame.N = cfg.nm_grid[p].first;
        frame.M = cfg.nm_grid[p].second;
        frame.validate();
        for (double v : cfg.vmax) {
            const double v_si = vmax_to_si(cfg.scenario, v);
            std::vector<double> values(cfg.realizations);
            std::vector<int> rejected(cfg.realizations);
            // realization r sees the same underlying draw at every v_max of this (N,M) point
            parallel_for(cfg.realizations, cfg.threads, [&](int r) {
                const auto seed = derive_seed(cfg.seed, p, static_cast<std::uint64_t>(r));
                const auto ch = draw_channel(cfg, frame, v_si, seed, &rejected[r]);
                values[r] = realization_nmse(ch, frame, cfg.baseline_keep_sync);
            });
            double mean = 0.0;
            for (double x : values) mean += x;
            mean /= cfg.realizations;
            double var = 0.0;
            for (double x : values) var += (x - mean) * (x - mean);
            const double stderr_ = cfg.realizations > 1
                                       ? std::sqrt(var / (cfg.realizations - 1) / cfg.realizations)
                                       : 0.0;
            SweepRow row{cfg.scenario, frame.N, frame.M, v_si, mean, stderr_, cfg.realizations, cfg.seed};
            for (int r : rejected) row.rejected += r;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "scenario,N,M,v_max_si,nmse_mean,nmse_stderr,n_real,seed\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%d,%d,%.10g,%.10g,%.10g,%d,%llu\n", to_string(r.scenario), r.N, r.M,
                      r.v_max_si, r.nmse_mean, r.nmse_stderr, r.n_real, static_cast<unsigned long long>(r.seed));
        out << line;
    }
}

// ---------------------------------------------------------------------------

ChannelRealization random_offgrid_channel(const FrameConfig& frame, double c, int P, double squint_ratio,
                                          double delay_taps, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0x0c0c));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double v_max = squint_ratio / frame.NM() * c;
    const int sync = sync_offset(v_max, c, frame);
    std::vector<Path> paths;
    double power = 0.0;
    std::vector<cplx> h(P);
    for (auto& g : h) {
        g = {gauss(rng), gauss(rng)};
        power += std::norm(g);
    }
    for (int i = 0; i < P; ++i) {
        const double excess = delay_taps * unit(rng);
        const double v = v_max * std::cos(pi * (2.0 * unit(rng) - 1.0));
        paths.push_back(derive_path(h[i] / std::sqrt(power), (sync + excess) * frame.Ts(), v, c, frame));
    }
    return make_realization(std::move(paths), c, v_max, frame, seed, sync);
}

DdFrame random_frame(int M, int N, std::uint64_t seed, const ZpRange* zp) {
    std::mt19937_64 rng(derive_seed(seed, 0xf4a3));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    DdFrame x(M, N);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) {
            double re = gauss(rng);
            double im = gauss(rng);
            const bool keep = zp == nullptr || (m >= zp->m_min && m <= zp->m_max);
            x(m, n) = keep ? cplx{re, im} : cplx{};
        }
    }
    return x;
}

double max_rel_error(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw ConfigError("max_rel_error: size mismatch");
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err = std::max(err, std::abs(a[i] - b[i]));
        ref = std::max(ref, std::abs(b[i]));
    }
    return ref > 0.0 ? err / ref : err;
}

bool OracleReport::passed() const {
    return exact_vs_taps <= tol && exact_vs_rcp <= tol && zp_exact_vs_zp <= tol && zp_vs_rcp <= tol_tight &&
           nmse_dense_vs_banded <= tol_tight;
}

nlohmann::json OracleReport::to_json() const {
    return {{"exact_vs_taps", exact_vs_taps},
            {"exact_vs_rcp", exact_vs_rcp},
            {"zp_exact_vs_zp", zp_exact_vs_zp},
            {"zp_vs_rcp", zp_vs_rcp},
            {"nmse_dense_vs_banded", nmse_dense_vs_banded},
            {"tol", tol},
            {"tol_tight", tol_tight},
            {"passed", passed()}};
}

namespace {

std::vector<cplx> block_samples(const TimeSamples& s) {
    std::vector<cplx> v;
    v.reserve(static_cast<std::size_t>(s.M()) * s.N());
    for (int m = 0; m < s.M(); ++m)
        for (int nd = 0; nd < s.N(); ++nd) v.push_back(s(m, nd));
    return v;
}

double dense_nmse(const DdChannelMatrix& H, const DdChannelMatrix& H_hat) {
    const auto A = to_dense(H);
    const auto B = to_dense(H_hat);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        err += std::norm(A[i] - B[i]);
        ref += std::norm(A[i]);
    }
    return err / ref;
}

}  // namespace

OracleReport run_oracle_check(const ScenarioConfig& cfg, OracleHooks hooks) {
    FrameConfig rcp = cfg.frame;
    rcp.prefix = PrefixMode::Rcp;
    rcp.validate();
    FrameConfig zpf = rcp;
    zpf.prefix = PrefixMode::Zp;

    const auto ch = random_offgrid_channel(rcp, cfg.c, 3, 1.5, 6.0, cfg.seed);
    DdChannelMatrix H = build_G(ch, rcp);
    if (hooks.corrupt_kernel) {
        auto row = H.block_for_write(H.taps() / 2, rcp.M / 2);
        row[1] += 1e-3;
    }

    OracleReport rep;

    // RCP: time-domain oracle, tap form, banded matvec
    const DdFrame x = random_frame(rcp.M, rcp.N, derive_seed(cfg.seed, 1));
    const TimeSamples xt = dd_to_time(x, rcp);
    const TimeSamples y_exact = propagate_exact(xt, ch, rcp);
    const TimeSamples y_taps = propagate_taps(xt, tap_response(ch, rcp), rcp);
    rep.exact_vs_taps = max_rel_error(block_samples(y_taps), block_samples(y_exact));
    const DdFrame Y_ref = time_to_dd(y_exact, rcp);
    rep.exact_vs_rcp = max_rel_error(apply_rcp(H, x).data(), Y_ref.data());

    // ZP: compliant input, both matvecs and the ZP time-domain chain
    if (!H.zp()) throw TapRangeError("oracle channel admits no zero-padding range");
    const ZpRange zp = *H.zp();
    const DdFrame xz = random_frame(rcp.M, rcp.N, derive_seed(cfg.seed, 2), &zp);
    const DdChannelMatrix Hz = H.with_mode(PrefixMode::Zp);
    const DdFrame Yz = apply_zp(Hz, xz);
    const DdFrame Yz_ref = time_to_dd(propagate_exact(dd_to_time(xz, zpf), ch, zpf), zpf);
    rep.zp_exact_vs_zp = max_rel_error(Yz.data(), Yz_ref.data());
    rep.zp_vs_rcp = max_rel_error(Yz.data(), apply_rcp(H, xz).data());

    // NMSE: kernel identity vs dense Frobenius norms
    const DdChannelMatrix H_hat = build_G(ch, rcp, {.dse = false, .keep_sync_offset = true});
    const double dense = dense_nmse(H, H_hat);
    rep.nmse_dense_vs_banded = std::fabs(nmse(H, H_hat) - dense) / dense;
    return rep;
}

}  // namespace oddm
