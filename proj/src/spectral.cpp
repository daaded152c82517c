/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "emscope/error.hpp"
#include "emscope/fft.hpp"

namespace emscope::spectral {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> make_window(WindowFn fn, int n) {
    if (n < 1) throw Error("InvalidWindow", "window length must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (fn == WindowFn::hann && n > 1) {
        for (int i = 0; i < n; ++i)
            w[static_cast<std::size_t>(i)] =
                0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return w;
}

int time_bins_for(int n_samples, const StftParams& params) {
    if (params.window_len > n_samples) return 0;
    return (n_samples - params.window_len) / params.hop + 1;
}

Spectrogram stft(const Trace& trace, const StftParams& params) {
    const int n_samples = static_cast<int>(trace.samples.size());
    if (params.window_len < 1) throw Error("InvalidWindow", "window length must be >= 1");
    if (params.hop < 1 || params.hop > params.window_len)
        throw Error("InvalidHop", "hop must be in [1, window_len]");
    if (params.window_len > n_samples)
        throw Error("WindowTooLong", "window_len " + std::to_string(params.window_len) +
                                         " exceeds trace length " + std::to_string(n_samples));

    const int L = params.window_len;
    const int n_time = time_bins_for(n_samples, params);
    const int n_freq = freq_bins_for(L);
    const auto window = make_window(params.window_fn, L);

    Spectrogram spec;
    spec.params = params;
    spec.n_time = n_time;
    spec.n_freq = n_freq;
    spec.values.resize(static_cast<std::size_t>(n_time) * n_freq);
    spec.freq_axis_hz.resize(static_cast<std::size_t>(n_freq));
    for (int k = 0; k < n_freq; ++k)
        spec.freq_axis_hz[static_cast<std::size_t>(k)] =
            static_cast<double>(k) * trace.sample_rate_hz / static_cast<double>(L);
    spec.time_axis_s.resize(static_cast<std::size_t>(n_time));
    for (int t = 0; t < n_time; ++t)
        spec.time_axis_s[static_cast<std::size_t>(t)] =
            (static_cast<double>(t) * params.hop + static_cast<double>(L) / 2.0) /
            trace.sample_rate_hz;

    fft::Fft plan(static_cast<std::size_t>(L));
    std::vector<std::complex<double>> in(static_cast<std::size_t>(L));
    std::vector<std::complex<double>> out(static_cast<std::size_t>(L));
    for (int t = 0; t < n_time; ++t) {
        const double* seg = trace.samples.data() + static_cast<std::size_t>(t) * params.hop;
        for (int i = 0; i < L; ++i)
            in[static_cast<std::size_t>(i)] = {seg[i] * window[static_cast<std::size_t>(i)], 0.0};
        plan.forward(in.data(), out.data());
        for (int k = 0; k < n_freq; ++k) spec.at(t, k) = std::abs(out[static_cast<std::size_t>(k)]);
    }
    return spec;
}

namespace {

void check_same_shape(std::span<const Spectrogram> spectrograms) {
    if (spectrograms.size() < 2)
        throw Error("DimensionMismatch", "ensemble statistics need >= 2 spectrograms");
    const auto& first = spectrograms.front();
    for (const auto& s : spectrograms) {
        if (s.n_time != first.n_time || s.n_freq != first.n_freq ||
            s.params.window_len != first.params.window_len || s.params.hop != first.params.hop)
            throw Error("DimensionMismatch", "spectrogram dimensions/params differ");
    }
}

}  // namespace

Spectrogram ensemble_mean(std::span<const Spectrogram> spectrograms) {
    check_same_shape(spectrograms);
    Spectrogram mean = spectrograms.front();
    // Accumulated in fixed trace order so results do not depend on how the
    // per-trace transforms were scheduled.
    for (std::size_t s = 1; s < spectrograms.size(); ++s) {
        const auto& v = spectrograms[s].values;
        for (std::size_t i = 0; i < mean.values.size(); ++i) mean.values[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(spectrograms.size());
    for (auto& v : mean.values) v *= inv;
    return mean;
}

Spectrogram ensemble_variance(std::span<const Spectrogram> spectrograms, const Spectrogram& mean) {
    check_same_shape(spectrograms);
    if (mean.n_time != spectrograms.front().n_time || mean.n_freq != spectrograms.front().n_freq)
        throw Error("DimensionMismatch", "mean dimensions differ from ensemble");
    Spectrogram var = mean;
    std::fill(var.values.begin(), var.values.end(), 0.0);
    for (const auto& s : spectrograms) {
        for (std::size_t i = 0; i < var.values.size(); ++i) {
            const double d = s.values[i] - mean.values[i];
            var.values[i] += d * d;
        }
    }
    // Population variance: the ensemble is the entire population under test.
    const double inv = 1.0 / static_cast<double>(spectrograms.size());
    for (auto& v : var.values) v *= inv;
    return var;
}

double default_eps(const Spectrogram& mean, double eps_rel) {
    double max_mean = 0.0;
    for (double v : mean.values) max_mean = std::max(max_mean, v);
    return max_mean > 0.0 ? eps_rel * max_mean : eps_rel;
}

StabilityMap stability_map(const Spectrogram& mean, const Spectrogram& variance, double eps) {
    if (mean.n_time != variance.n_time || mean.n_freq != variance.n_freq)
        throw Error("DimensionMismatch", "mean/variance dimensions differ");
    if (!(eps > 0.0)) throw Error("InvalidEps", "eps must be > 0");

    StabilityMap map;
    map.n_time = mean.n_time;
    map.n_freq = mean.n_freq;
    map.freq_axis_hz = mean.freq_axis_hz;
    map.time_axis_s = mean.time_axis_s;
    map.params = mean.params;
    map.scores.resize(mean.values.size());

    double max_raw = 0.0;
    for (std::size_t i = 0; i < mean.values.size(); ++i) {
        const double raw = mean.values[i] / (std::sqrt(variance.values[i]) + eps);
        map.scores[i] = raw;
        max_raw = std::max(max_raw, raw);
    }
    if (max_raw > 0.0) {
        // Normalized scores are snapped to a 2^-20 grid. Summation-order and
        // rescaling roundoff sits around 1e-15, far below the grid, so the
        // discrete decisions downstream (component counts, verdicts) cannot
        // depend on trace order or a common amplitude factor. 0 and 1 are
        // grid points, so the [0,1] range and the exact peak survive.
        constexpr double kGrid = 1048576.0;
        for (auto& s : map.scores) s = std::nearbyint((s / max_raw) * kGrid) / kGrid;
    }
    return map;
}

FeatureSet extract_features(const StabilityMap& map, int time_bin) {
    if (time_bin < 0 || time_bin >= map.n_time)
        throw Error("IndexOutOfRange", "time_bin " + std::to_string(time_bin) + " not in [0, " +
                                           std::to_string(map.n_time) + ")");
    FeatureSet fs;
    fs.time_bin = time_bin;
    fs.window_len = map.params.window_len;
    fs.points.resize(static_cast<std::size_t>(map.n_freq));
    for (int k = 0; k < map.n_freq; ++k)
        fs.points[static_cast<std::size_t>(k)] = {map.freq_axis_hz[static_cast<std::size_t>(k)],
                                                  map.at(time_bin, k)};
    return fs;
}

void write_matrix_csv(const std::vector<double>& values, int n_rows, int n_cols,
                      const std::vector<double>& row_axis, const std::vector<double>& col_axis,
                      const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("FileOpenFailed", "cannot open " + file.string() + " for writing");
    char buf[64];
    std::string line;
    for (int c = 0; c < n_cols; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", col_axis[static_cast<std::size_t>(c)]);
        line += buf;
    }
    line += '\n';
    out << line;
    for (int r = 0; r < n_rows; ++r) {
        line.clear();
        std::snprintf(buf, sizeof buf, "%.17g", row_axis[static_cast<std::size_t>(r)]);
        line += buf;
        for (int c = 0; c < n_cols; ++c) {
            std::snprintf(buf, sizeof buf, ",%.17g",
                          values[static_cast<std::size_t>(r) * n_cols + c]);
            line += buf;
        }
        line += '\n';
        out << line;
    }
    if (!out) throw Error("FileWriteFailed", "short write to " + file.string());
}

}  // namespace emscope::spectral
