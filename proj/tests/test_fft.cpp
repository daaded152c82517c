/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/fft.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "emscope/prng.hpp"

namespace {

using cplx = std::complex<double>;

// Straight O(n^2) reference transform.
std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n);
            acc += x[j] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
    emscope::Prng rng(seed);
    std::vector<cplx> x(n);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
    return x;
}

double rel_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

TEST_CASE("forward transform matches the naive DFT at many lengths") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 16u, 37u, 120u, 200u, 256u, 333u, 480u}) {
        const auto x = random_signal(n, 1000 + n);
        emscope::fft::Fft plan(n);
        std::vector<cplx> got(n);
        plan.forward(x.data(), got.data());
        const auto want = naive_dft(x);
        CAPTURE(n);
        CHECK(rel_error(got, want) < 1e-10);
    }
}

TEST_CASE("inverse undoes forward") {
    for (std::size_t n : {2u, 5u, 120u, 333u, 512u}) {
        const auto x = random_signal(n, 77 + n);
        emscope::fft::Fft plan(n);
        std::vector<cplx> fwd(n), back(n);
        plan.forward(x.data(), fwd.data());
        plan.inverse(fwd.data(), back.data());
        CAPTURE(n);
        CHECK(rel_error(back, x) < 1e-12);
    }
}

TEST_CASE("transform is linear") {
    const std::size_t n = 200;
    const auto x = random_signal(n, 5);
    emscope::fft::Fft plan(n);
    std::vector<cplx> scaled(n), fx(n), fscaled(n);
    const cplx a{2.5, -1.25};
    for (std::size_t i = 0; i < n; ++i) scaled[i] = a * x[i];
    plan.forward(x.data(), fx.data());
    plan.forward(scaled.data(), fscaled.data());
    for (auto& v : fx) v *= a;
    CHECK(rel_error(fscaled, fx) < 1e-12);
}
