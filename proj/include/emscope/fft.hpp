/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_FFT_HPP
#define EMSCOPE_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace emscope::fft {

// DFT plan for a fixed length n (any n >= 1, no zero padding implied).
// Power-of-two lengths run an iterative radix-2 transform; everything else
// goes through Bluestein's chirp-z algorithm on top of it. One instance is
// not thread-safe (it owns scratch buffers); use one plan per thread.
class Fft {
  public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    // out[k] = sum_n in[n] * exp(-2*pi*i*n*k / N), k = 0..N-1.
    void forward(const std::complex<double>* in, std::complex<double>* out);

    // Unscaled inverse (exp(+...)); divides by N so inverse(forward(x)) == x.
    void inverse(const std::complex<double>* in, std::complex<double>* out);

  private:
    void transform(const std::complex<double>* in, std::complex<double>* out, bool invert);

    std::size_t n_;
    std::size_t m_ = 0;  // power-of-two convolution length for Bluestein
    bool pow2_;
    std::vector<std::complex<double>> roots_;      // forward roots for length m_ (or n_)
    std::vector<std::complex<double>> chirp_;      // exp(-i*pi*k^2/n)
    std::vector<std::complex<double>> kernel_fft_; // FFT_m of the wrapped conjugate chirp
    std::vector<std::complex<double>> work_;
};

// Convenience: one-shot complex DFT of a real signal.
std::vector<std::complex<double>> dft_real(const std::vector<double>& x);

}  // namespace emscope::fft

#endif
