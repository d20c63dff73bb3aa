// SPDX-License-Identifier: Apache-2.0

#include "oddm/pulse.hpp"

#include <algorithm>
#include <cmath>

namespace oddm {

namespace {

// sin(pi r) for r in [0, 1]
double sinpi_unit(double r) {
    if (r == 0.0 || r == 1.0) return 0.0;
    if (r > 0.5) r = 1.0 - r;
    return std::sin(pi * r);
}

}  // namespace

double sinpi(double x) {
    if (x < 0.0) return -sinpi(-x);
    double r = std::fmod(x, 2.0);
    if (r > 1.0) return -sinpi_unit(r - 1.0);
    return sinpi_unit(r);
}

NyquistPulse::NyquistPulse(double beta, int Q) : beta_(beta), Q_(Q) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("roll-off must lie in [0,1]");
    if (Q < 1) throw ConfigError("Q must be >= 1");
}

double NyquistPulse::operator()(double x) const {
    double ax = std::fabs(x);
    if (!(ax < Q_)) return 0.0;
    double sinc = ax == 0.0 ? 1.0 : sinpi(ax) / (pi * ax);
    if (beta_ == 0.0) return sinc;
    double u = 2.0 * beta_ * ax;
    double e = 1.0 - u;
    // cos(pi u / 2) / (1 - u^2) == sin(pi e / 2) / (e (1 + u))
    double ratio = e == 0.0 ? 0.5 * pi : std::sin(0.5 * pi * e) / e;
    return sinc * ratio / (1.0 + u);
}

NyquistPulse::Stepper NyquistPulse::stepper(double dx) const {
    return {dx, std::polar(1.0, pi * dx), std::polar(1.0, pi * beta_ * dx)};
}

void NyquistPulse::sample_progression(double x0, double dx, std::span<double> out) const {
    sample_progression(x0, stepper(dx), out);
}

void NyquistPulse::sample_progression(double x0, const Stepper& step, std::span<double> out) const {
    const double dx = step.dx;
    if (dx == 0.0) {
        std::fill(out.begin(), out.end(), (*this)(x0));
        return;
    }
    // sin(pi x) and cos(pi beta x) by phase rotation, reseeded every few
    // steps; the closed form takes over near x = 0 and |x| = 1/(2 beta) where
    // the quotients would amplify the rotation's absolute error
    constexpr std::size_t reseed = 64;
    const double Qd = Q_;
    cplx zs, zc;
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double x = x0 + dx * static_cast<double>(n);
        if (n % reseed == 0) {
            zs = std::polar(1.0, pi * x);
            zc = std::polar(1.0, pi * beta_ * x);
        }
        const double ax = std::fabs(x);
        const double u = 2.0 * beta_ * ax;
        if (!(ax < Qd)) {
            out[n] = 0.0;
        } else if (ax < 0.125 || std::fabs(1.0 - u) < 0.05) {
            out[n] = (*this)(x);
        } else {
            out[n] = zs.imag() * zc.real() / (pi * x * (1.0 - u * u));
        }
        zs *= step.sin_step;
        zc *= step.cos_step;
    }
}

double pulse_eval(double t, const FrameConfig& cfg) {
    return NyquistPulse(cfg)(t * cfg.fs);
}

}  // namespace oddm
