// SPDX-License-Identifier: Apache-2.0
//
// Thin RAII wrapper over an FFTW length-n complex transform. Unnormalized:
// Forward computes sum_t x[t] e^{-j2pi kt/n}, Backward uses e^{+j2pi kt/n}.

#pragma once

#include <fftw3.h>

#include <span>

#include "oddm/core.hpp"

namespace oddm::detail {

class Dft {
  public:
    enum class Direction { Forward, Backward };

    Dft(int n, Direction dir);
    ~Dft();
    Dft(const Dft&) = delete;
    Dft& operator=(const Dft&) = delete;

    int size() const { return n_; }

    /// Work buffer; fill it, call run(), read it back.
    std::span<cplx> buffer() { return {reinterpret_cast<cplx*>(buf_), static_cast<std::size_t>(n_)}; }
    void run();

  private:
    int n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace oddm::detail
