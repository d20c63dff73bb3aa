// SPDX-License-Identifier: Apache-2.0
//
// Experiment drivers behind the `oddm` CLI: DD impulse-response maps,
// Monte Carlo NMSE sweeps of the squint-ignorant model, and the oracle
// self-check. Everything here is deterministic given the config seed.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oddm/channel.hpp"
#include "oddm/core.hpp"
#include "oddm/ddmatrix.hpp"

namespace oddm {

enum class Scenario { TypeI, TypeII };
enum class DseSelect { On, Off, Both };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ScenarioConfig {
    Scenario scenario = Scenario::TypeII;
    FrameConfig frame;
    double c = 1500.0;
    std::vector<std::pair<int, int>> nm_grid;  // (N, M) pairs swept by nmse-sweep
    std::vector<double> vmax;                  // km/h (TypeI) or knots (TypeII)
    int realizations = 100;
    std::uint64_t seed = 1;
    double delay_spread = 300e-9;  // TDL-C RMS delay spread, TypeI only
    int uwa_paths = 10;
    bool baseline_keep_sync = true;
    DseSelect dse = DseSelect::Both;
    std::string out;
    int threads = 0;  // 0: hardware concurrency

    // impulse experiment: single path at this excess delay and speed
    double impulse_excess_delay = 1.5e-3;  // s
    double impulse_speed = knot_to_mps;    // m/s
};

/// Table-level defaults for each scenario (c, fc, fs, roll-off, grids).
ScenarioConfig default_config(Scenario s);

/// Overlay a JSON document (same keys as the CLI flags) onto cfg.
void apply_json(ScenarioConfig& cfg, const nlohmann::json& j);

/// km/h -> m/s for TypeI, knots -> m/s for TypeII.
double vmax_to_si(Scenario s, double v);

/// Draw one channel realization for the scenario at the given v_max (m/s).
/// `rejected` receives the UWA redraw count.
ChannelRealization draw_channel(const ScenarioConfig& cfg, const FrameConfig& frame, double v_max_si,
                                std::uint64_t seed, int* rejected = nullptr);

// ---------------------------------------------------------------------------

struct ImpulseMap {
    bool dse = true;
    int taps = 0;                 // rows: delay bins 0..l'_max
    int N = 0;                    // columns: Doppler bins
    std::vector<double> magnitude;  // |Y[m,n]| / max |Y|, row-major taps x N
    std::vector<double> mag_db;     // 20 log10 of the above, floored at -400 dB

    double db(int m, int n) const { return mag_db[static_cast<std::size_t>(m) * N + n]; }
    double mag(int m, int n) const { return magnitude[static_cast<std::size_t>(m) * N + n]; }
};

struct ImpulseResult {
    ChannelRealization channel;
    std::vector<ImpulseMap> maps;
};

ImpulseResult run_impulse(const ScenarioConfig& cfg);
void write_impulse_csv(const ImpulseResult& result, std::ostream& out);

// ---------------------------------------------------------------------------

struct SweepRow {
    Scenario scenario;
    int N;
    int M;
    double v_max_si;
    double nmse_mean;
    double nmse_stderr;
    int n_real;
    std::uint64_t seed;
    int rejected = 0;  // UWA redraws, not part of the CSV
};

/// Per-realization NMSE between the squint-aware and squint-ignorant kernels.
double realization_nmse(const ChannelRealization& ch, const FrameConfig& frame, bool keep_sync_offset);

std::vector<SweepRow> run_nmse_sweep(const ScenarioConfig& cfg);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

// ---------------------------------------------------------------------------

/// Off-grid random channel for self-checks: P paths with delays uniform in
/// [sync, sync + delay_taps], speeds v_max cos(theta) where v_max gives
/// b_max * NM = squint_ratio, unit-power complex Gaussian gains.
ChannelRealization random_offgrid_channel(const FrameConfig& frame, double c, int P, double squint_ratio,
                                          double delay_taps, std::uint64_t seed);

/// Random complex Gaussian DD frame; ZP mode zeroes rows outside `zp` when given.
DdFrame random_frame(int M, int N, std::uint64_t seed, const ZpRange* zp = nullptr);

struct OracleReport {
    double exact_vs_taps = 0.0;       // time domain, exact propagation vs tap form
    double exact_vs_rcp = 0.0;        // DD domain, time-domain chain vs banded RCP matvec
    double zp_exact_vs_zp = 0.0;      // ZP framing, time-domain chain vs banded ZP matvec
    double zp_vs_rcp = 0.0;           // ZP-compliant input through both matvecs
    double nmse_dense_vs_banded = 0.0;  // relative gap, dense Frobenius vs kernel identity
    double tol = 1e-9;
    double tol_tight = 1e-12;

    bool passed() const;
    nlohmann::json to_json() const;
};

struct OracleHooks {
    bool corrupt_kernel = false;  // perturb one kernel value before comparing
};

OracleReport run_oracle_check(const ScenarioConfig& cfg, OracleHooks hooks = {});

/// max |a - b| / max |b| over two equally sized sequences.
double max_rel_error(std::span<const cplx> a, std::span<const cplx> b);

}  // namespace oddm
