/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace emscope::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Iterative radix-2 Cooley-Tukey, in place. roots holds exp(-2*pi*i*k/m)
// for k in [0, m/2); the inverse pass conjugates on the fly.
void radix2(std::complex<double>* a, std::size_t m,
            const std::vector<std::complex<double>>& roots, bool invert) {
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const std::size_t step = m / len;
        for (std::size_t i = 0; i < m; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = roots[k * step];
                if (invert) w = std::conj(w);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
    if (n == 0) throw std::invalid_argument("Fft: length must be >= 1");
    if (n == 1) return;
    if (pow2_) {
        roots_.resize(n_ / 2);
        for (std::size_t k = 0; k < n_ / 2; ++k) {
            const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n_);
            roots_[k] = {std::cos(ang), std::sin(ang)};
        }
        work_.resize(n_);
        return;
    }
    // Bluestein: X_k = w_k * (a (*) v)[k] with a_n = x_n*w_n, w_n = exp(-i*pi*n^2/N),
    // v_n = conj(w_n). The linear convolution runs as a circular one of length
    // m >= 2N-1. n^2 is reduced mod 2N before the angle so large indices lose
    // no precision.
    m_ = next_pow2(2 * n_ - 1);
    roots_.resize(m_ / 2);
    for (std::size_t k = 0; k < m_ / 2; ++k) {
        const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(m_);
        roots_[k] = {std::cos(ang), std::sin(ang)};
    }
    chirp_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t sq = (k * k) % (2 * n_);
        const double ang = -kTwoPi * 0.5 * static_cast<double>(sq) / static_cast<double>(n_);
        chirp_[k] = {std::cos(ang), std::sin(ang)};
    }
    kernel_fft_.assign(m_, {0.0, 0.0});
    kernel_fft_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
        kernel_fft_[k] = std::conj(chirp_[k]);
        kernel_fft_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(kernel_fft_.data(), m_, roots_, false);
    work_.resize(m_);
}

void Fft::transform(const std::complex<double>* in, std::complex<double>* out, bool invert) {
    if (n_ == 1) {
        out[0] = in[0];
        return;
    }
    if (pow2_) {
        for (std::size_t i = 0; i < n_; ++i) work_[i] = in[i];
        radix2(work_.data(), n_, roots_, invert);
        for (std::size_t i = 0; i < n_; ++i) out[i] = work_[i];
        return;
    }
    // The inverse non-pow2 transform reuses the forward machinery via
    // conjugation: IDFT(x) = conj(DFT(conj(x))) (the 1/N scale is applied by
    // the caller).
    for (std::size_t k = 0; k < n_; ++k) {
        const std::complex<double> x = invert ? std::conj(in[k]) : in[k];
        work_[k] = x * chirp_[k];
    }
    for (std::size_t k = n_; k < m_; ++k) work_[k] = {0.0, 0.0};
    radix2(work_.data(), m_, roots_, false);
    for (std::size_t k = 0; k < m_; ++k) work_[k] *= kernel_fft_[k];
    radix2(work_.data(), m_, roots_, true);
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
        const std::complex<double> y = work_[k] * chirp_[k] * scale;
        out[k] = invert ? std::conj(y) : y;
    }
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) {
    transform(in, out, false);
}

void Fft::inverse(const std::complex<double>* in, std::complex<double>* out) {
    transform(in, out, true);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= scale;
}

std::vector<std::complex<double>> dft_real(const std::vector<double>& x) {
    Fft plan(x.size());
    std::vector<std::complex<double>> in(x.size()), out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) in[i] = {x[i], 0.0};
    plan.forward(in.data(), out.data());
    return out;
}

}  // namespace emscope::fft
