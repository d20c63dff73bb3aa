// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "oddm/core.hpp"

namespace oddm {

/// sin(pi x) with exact zeros at integers and exact odd symmetry.
double sinpi(double x);

/**
 * Truncated raised-cosine Nyquist pulse, argument in units of Ts.
 *
 *   a(x) = sinc(x) cos(pi beta x) / (1 - (2 beta x)^2),   |x| < Q
 *   a(x) = 0,                                            |x| >= Q
 *
 * a(0) = 1 and a(n) = 0 for every nonzero integer n. The removable
 * singularity at |x| = 1/(2 beta) is evaluated through the identity
 * cos(pi u/2) = sin(pi (1-u)/2), which has no cancellation there.
 */
class NyquistPulse {
  public:
    NyquistPulse(double beta, int Q);
    explicit NyquistPulse(const FrameConfig& cfg) : NyquistPulse(cfg.beta, cfg.Q) {}

    double operator()(double x) const;

    /// Per-step rotations for a fixed increment dx, reusable across calls.
    struct Stepper {
        double dx = 0.0;
        cplx sin_step{1.0, 0.0};  // e^{j pi dx}
        cplx cos_step{1.0, 0.0};  // e^{j pi beta dx}
    };
    Stepper stepper(double dx) const;

    /// out[n] = a(x0 + n*dx).
    void sample_progression(double x0, double dx, std::span<double> out) const;
    void sample_progression(double x0, const Stepper& step, std::span<double> out) const;

    int half_length() const { return Q_; }
    double beta() const { return beta_; }

  private:
    double beta_;
    int Q_;
};

/// a(t) for t in seconds under the frame's sample rate, roll-off and Q.
double pulse_eval(double t, const FrameConfig& cfg);

}  // namespace oddm
