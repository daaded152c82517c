/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/spectral.hpp"

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "emscope/error.hpp"
#include "emscope/prng.hpp"
#include "emscope/synth.hpp"

using emscope::Error;
using emscope::Prng;
using emscope::Trace;
using namespace emscope::spectral;

namespace {

Trace random_trace(int n, double fs, std::uint64_t seed) {
    Prng rng(seed);
    Trace t;
    t.sample_rate_hz = fs;
    t.samples.resize(static_cast<std::size_t>(n));
    for (auto& s : t.samples) s = rng.gaussian();
    return t;
}

// One-sided Parseval oracle: time-domain energy of the windowed segment must
// match the spectrum energy, with the doubling pattern depending on parity.
double spectrum_energy(const Spectrogram& spec, int t) {
    const int L = spec.params.window_len;
    const int n_freq = spec.n_freq;
    double acc = spec.at(t, 0) * spec.at(t, 0);
    const bool even = L % 2 == 0;
    for (int k = 1; k < n_freq; ++k) {
        const double m2 = spec.at(t, k) * spec.at(t, k);
        const bool nyquist = even && k == n_freq - 1;
        acc += nyquist ? m2 : 2.0 * m2;
    }
    return acc / static_cast<double>(L);
}

}  // namespace

TEST_CASE("window closed forms") {
    CHECK(make_window(WindowFn::hann, 1) == std::vector<double>{1.0});
    const auto h3 = make_window(WindowFn::hann, 3);
    REQUIRE(h3.size() == 3);
    CHECK(h3[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h3[1] == doctest::Approx(1.0));
    CHECK(h3[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(make_window(WindowFn::rectangular, 4) == std::vector<double>(4, 1.0));

    // Sum of squares of the symmetric hann: direct summation against the
    // closed form 3(n-1)/8 (the two wrap-around cosine sums each equal 1).
    for (int n : {8, 120, 200, 333}) {
        const auto w = make_window(WindowFn::hann, n);
        double direct = 0.0;
        for (double v : w) direct += v * v;
        CHECK(direct == doctest::Approx(3.0 * (n - 1) / 8.0).epsilon(1e-12));
    }
}

TEST_CASE("stft dimensions follow the closed-form bin counts") {
    for (int n_samples : {1000, 4096, 16384}) {
        for (int L : {120, 200, 333, 480}) {
            StftParams params{L, L / 2, WindowFn::hann};
            const auto spec = stft(random_trace(n_samples, 1e8, 1), params);
            CHECK(spec.n_freq == L / 2 + 1);
            CHECK(spec.n_time == (n_samples - L) / (L / 2) + 1);
            CHECK(spec.freq_axis_hz.front() == 0.0);
            CHECK(spec.freq_axis_hz[1] == doctest::Approx(1e8 / L));
            CHECK(spec.time_axis_s.front() == doctest::Approx(L / 2.0 / 1e8));
            for (double v : spec.values) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
            }
        }
    }
}

TEST_CASE("stft of the zero trace is zero") {
    Trace t;
    t.sample_rate_hz = 1e6;
    t.samples.assign(1000, 0.0);
    const auto spec = stft(t, {100, 50, WindowFn::hann});
    for (double v : spec.values) CHECK(v == 0.0);
}

TEST_CASE("bin-aligned tone with rectangular window recovers A*L/2") {
    const int L = 200;
    const int k0 = 46;
    const double A = 0.75;
    Trace t;
    t.sample_rate_hz = 1e8;
    t.samples.resize(1000);
    for (std::size_t i = 0; i < t.samples.size(); ++i)
        t.samples[i] = A * std::cos(2.0 * M_PI * static_cast<double>(k0) *
                                    static_cast<double>(i) / static_cast<double>(L));
    const auto spec = stft(t, {L, 100, WindowFn::rectangular});
    for (int tb = 0; tb < spec.n_time; ++tb) {
        CHECK(spec.at(tb, k0) == doctest::Approx(A * L / 2.0).epsilon(1e-9));
        for (int k = 0; k < spec.n_freq; ++k) {
            if (k == k0) continue;
            CHECK(spec.at(tb, k) < 1e-9 * (A * L / 2.0));
        }
    }
}

TEST_CASE("per-segment Parseval identity") {
    for (int L : {120, 200, 333, 480}) {
        const Trace t = random_trace(3 * L, 1e8, 42 + L);
        StftParams params{L, L / 2, WindowFn::hann};
        const auto spec = stft(t, params);
        const auto window = make_window(WindowFn::hann, L);
        for (int tb = 0; tb < spec.n_time; ++tb) {
            double time_energy = 0.0;
            for (int i = 0; i < L; ++i) {
                const double s = t.samples[static_cast<std::size_t>(tb) * params.hop + i] *
                                 window[static_cast<std::size_t>(i)];
                time_energy += s * s;
            }
            CAPTURE(L);
            CHECK(spectrum_energy(spec, tb) == doctest::Approx(time_energy).epsilon(1e-9));
        }
    }
}

TEST_CASE("stft magnitudes are absolutely homogeneous") {
    const Trace t = random_trace(2000, 1e8, 9);
    Trace scaled = t;
    for (auto& s : scaled.samples) s *= -3.25;
    const StftParams params{120, 60, WindowFn::hann};
    const auto a = stft(t, params);
    const auto b = stft(scaled, params);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(b.values[i] == doctest::Approx(3.25 * a.values[i]).epsilon(1e-12));
}

TEST_CASE("window longer than the trace is rejected") {
    CHECK_THROWS_WITH_AS(stft(random_trace(100, 1e6, 1), {128, 64, WindowFn::hann}),
                         doctest::Contains("WindowTooLong"), Error);
}

TEST_CASE("ensemble mean: idempotence, closed form, and flatness on noise") {
    const StftParams params{64, 32, WindowFn::hann};
    SUBCASE("N copies reproduce the input") {
        const auto spec = stft(random_trace(512, 1e8, 3), params);
        const std::vector<Spectrogram> copies(5, spec);
        const auto mean = ensemble_mean(copies);
        for (std::size_t i = 0; i < mean.values.size(); ++i)
            CHECK(mean.values[i] == doctest::Approx(spec.values[i]).epsilon(1e-14));
    }
    SUBCASE("two spectrograms average element-wise") {
        const auto a = stft(random_trace(512, 1e8, 4), params);
        const auto b = stft(random_trace(512, 1e8, 5), params);
        const std::vector<Spectrogram> both{a, b};
        const auto mean = ensemble_mean(both);
        for (std::size_t i = 0; i < mean.values.size(); ++i)
            CHECK(mean.values[i] == doctest::Approx(0.5 * (a.values[i] + b.values[i])).epsilon(1e-14));
    }
    SUBCASE("mean magnitude of white noise is flat across frequency") {
        std::vector<Spectrogram> specs;
        for (int i = 0; i < 200; ++i) specs.push_back(stft(random_trace(2048, 1e8, 100 + i), params));
        const auto mean = ensemble_mean(specs);
        std::vector<double> by_freq(static_cast<std::size_t>(mean.n_freq), 0.0);
        for (int t = 0; t < mean.n_time; ++t)
            for (int k = 0; k < mean.n_freq; ++k) by_freq[static_cast<std::size_t>(k)] += mean.at(t, k);
        const double overall =
            std::accumulate(by_freq.begin(), by_freq.end(), 0.0) / static_cast<double>(mean.n_freq);
        for (double v : by_freq) CHECK(std::abs(v - overall) < 0.15 * overall);
    }
}

TEST_CASE("ensemble variance: zero on identical inputs, closed form for two, oracle match") {
    const StftParams params{64, 32, WindowFn::hann};
    const auto a = stft(random_trace(512, 1e8, 6), params);
    const auto b = stft(random_trace(512, 1e8, 7), params);
    SUBCASE("identical spectrograms have zero variance") {
        const std::vector<Spectrogram> copies(4, a);
        const auto var = ensemble_variance(copies, ensemble_mean(copies));
        for (double v : var.values) CHECK(v == 0.0);
    }
    SUBCASE("two-spectrogram closed form (a-b)^2/4") {
        const std::vector<Spectrogram> both{a, b};
        const auto var = ensemble_variance(both, ensemble_mean(both));
        for (std::size_t i = 0; i < var.values.size(); ++i) {
            const double d = a.values[i] - b.values[i];
            CHECK(var.values[i] == doctest::Approx(d * d / 4.0).epsilon(1e-12));
        }
    }
    SUBCASE("random ensemble matches the textbook two-pass oracle") {
        std::vector<Spectrogram> specs;
        for (int i = 0; i < 12; ++i) specs.push_back(stft(random_trace(512, 1e8, 300 + i), params));
        const auto mean = ensemble_mean(specs);
        const auto var = ensemble_variance(specs, mean);
        for (std::size_t i = 0; i < var.values.size(); ++i) {
            double m = 0.0;
            for (const auto& s : specs) m += s.values[i];
            m /= static_cast<double>(specs.size());
            double v = 0.0;
            for (const auto& s : specs) v += (s.values[i] - m) * (s.values[i] - m);
            v /= static_cast<double>(specs.size());
            CHECK(var.values[i] == doctest::Approx(v).epsilon(1e-10));
        }
    }
}

TEST_CASE("ensemble statistics are permutation invariant") {
    const StftParams params{64, 32, WindowFn::hann};
    std::vector<Spectrogram> specs;
    for (int i = 0; i < 8; ++i) specs.push_back(stft(random_trace(512, 1e8, 40 + i), params));
    std::vector<Spectrogram> reversed(specs.rbegin(), specs.rend());
    const auto m1 = ensemble_mean(specs);
    const auto m2 = ensemble_mean(reversed);
    const auto v1 = ensemble_variance(specs, m1);
    const auto v2 = ensemble_variance(reversed, m2);
    for (std::size_t i = 0; i < m1.values.size(); ++i) {
        CHECK(m1.values[i] == doctest::Approx(m2.values[i]).epsilon(1e-12));
        CHECK(v1.values[i] == doctest::Approx(v2.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("stability map construction") {
    const StftParams params{64, 32, WindowFn::hann};
    const auto base = stft(random_trace(512, 1e8, 8), params);
    SUBCASE("zero variance: scores proportional to mean, peak exactly 1") {
        Spectrogram var = base;
        std::fill(var.values.begin(), var.values.end(), 0.0);
        const auto map = stability_map(base, var, 1e-9);
        double max_mean = 0.0;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < base.values.size(); ++i) {
            if (base.values[i] > max_mean) {
                max_mean = base.values[i];
                argmax = i;
            }
        }
        CHECK(map.scores[argmax] == 1.0);
        // Scores land on the 2^-20 anti-jitter grid.
        for (std::size_t i = 0; i < map.scores.size(); ++i) {
            const double expect = std::nearbyint(base.values[i] / max_mean * 1048576.0) / 1048576.0;
            CHECK(map.scores[i] == expect);
        }
    }
    SUBCASE("zero mean gives all-zero scores") {
        Spectrogram zero = base;
        std::fill(zero.values.begin(), zero.values.end(), 0.0);
        const auto map = stability_map(zero, base, 1e-9);
        for (double s : map.scores) CHECK(s == 0.0);
    }
    SUBCASE("scores live in [0,1] with max exactly 1") {
        const auto other = stft(random_trace(512, 1e8, 9), params);
        const std::vector<Spectrogram> both{base, other};
        const auto mean = ensemble_mean(both);
        const auto var = ensemble_variance(both, mean);
        const auto map = stability_map(mean, var, default_eps(mean));
        double max_score = 0.0;
        for (double s : map.scores) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            max_score = std::max(max_score, s);
        }
        CHECK(max_score == 1.0);
    }
}

TEST_CASE("a shared persistent tone dominates the stability map in every time bin") {
    // Per-trace random mode tones come and go; the one shared line keeps the
    // top score across all time bins.
    emscope::synth::SynthConfig cfg;
    cfg.n_traces = 64;
    cfg.n_samples = 4096;
    cfg.sample_rate_hz = 1e8;
    cfg.clock_freq_hz = 0.0;
    cfg.clock_amp = 0.0;
    cfg.modes = {{{{1.5e7, 0.5}}, 256}, {{{3.0e7, 0.5}}, 256}, {{{4.0e7, 0.5}}, 256}};
    cfg.noise_sigma = 0.2;
    cfg.master_seed = 21;
    emscope::synth::HtConfig ht;
    ht.plaintext_seed = 9;
    ht.chip_rate_hz = 2e4;
    ht.carrier_hz = 2.5e7;  // bin 32 at window 128
    ht.amp = 0.2;
    cfg.ht = ht;
    const auto set = emscope::synth::synth_traceset(cfg);

    const StftParams params{128, 64, WindowFn::hann};
    std::vector<Spectrogram> specs;
    for (const auto& t : set.traces) specs.push_back(stft(t, params));
    const auto mean = ensemble_mean(specs);
    const auto var = ensemble_variance(specs, mean);
    const auto map = stability_map(mean, var, default_eps(mean));

    const int carrier_bin = 32;
    int hits = 0;
    for (int t = 0; t < map.n_time; ++t) {
        int argmax = 0;
        for (int k = 1; k < map.n_freq; ++k)
            if (map.at(t, k) > map.at(t, argmax)) argmax = k;
        if (argmax == carrier_bin) ++hits;
    }
    CHECK(hits >= static_cast<int>(0.95 * map.n_time));
}

TEST_CASE("extract_features is a row view") {
    const StftParams params{200, 100, WindowFn::hann};
    const auto base = stft(random_trace(1200, 1e8, 10), params);
    const auto other = stft(random_trace(1200, 1e8, 11), params);
    const std::vector<Spectrogram> both{base, other};
    const auto mean = ensemble_mean(both);
    const auto var = ensemble_variance(both, mean);
    const auto map = stability_map(mean, var, default_eps(mean));

    const auto fs = extract_features(map, 0);
    CHECK(fs.points.size() == 101);  // window 200 -> 101 bins
    CHECK(fs.window_len == 200);
    for (std::size_t k = 1; k < fs.points.size(); ++k)
        CHECK(fs.points[k].x > fs.points[k - 1].x);

    // Reassembling every row reproduces the scores matrix exactly.
    for (int t = 0; t < map.n_time; ++t) {
        const auto row = extract_features(map, t);
        for (int k = 0; k < map.n_freq; ++k)
            CHECK(row.points[static_cast<std::size_t>(k)].y == map.at(t, k));
    }
    CHECK_THROWS_WITH_AS(extract_features(map, map.n_time), doctest::Contains("IndexOutOfRange"),
                         Error);

    SUBCASE("all-zero stability row maps to zero scores") {
        StabilityMap zero = map;
        std::fill(zero.scores.begin(), zero.scores.end(), 0.0);
        const auto z = extract_features(zero, 2);
        for (const auto& p : z.points) CHECK(p.y == 0.0);
    }
}
