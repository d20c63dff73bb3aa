// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <mutex>

namespace oddm::detail {

namespace {
// FFTW's planner is not reentrant; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Dft::Dft(int n, Direction dir) : n_(n) {
    if (n < 1) throw ConfigError("transform length must be positive");
    std::lock_guard lock(planner_mutex());
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    plan_ = fftw_plan_dft_1d(n, buf_, buf_, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
    if (plan_ == nullptr) {
        fftw_free(buf_);
        throw std::runtime_error("FFTW plan creation failed");
    }
}

Dft::~Dft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
}

void Dft::run() { fftw_execute(plan_); }

}  // namespace oddm::detail
