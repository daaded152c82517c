/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_SPECTRAL_HPP
#define EMSCOPE_SPECTRAL_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "emscope/trace.hpp"

namespace emscope::spectral {

enum class WindowFn { hann, rectangular };

struct StftParams {
    int window_len = 0;
    int hop = 0;
    WindowFn window_fn = WindowFn::hann;
};

// One-sided magnitude grid, row-major [time bin][freq bin]. Variance
// spectrograms reuse the same container.
struct Spectrogram {
    std::vector<double> values;
    int n_time = 0;
    int n_freq = 0;
    std::vector<double> freq_axis_hz;
    std::vector<double> time_axis_s;
    StftParams params;

    double& at(int t, int k) { return values[static_cast<std::size_t>(t) * n_freq + k]; }
    double at(int t, int k) const { return values[static_cast<std::size_t>(t) * n_freq + k]; }
};

// Per-cell inverse coefficient of variation across the ensemble,
// max-normalized to [0, 1].
struct StabilityMap {
    std::vector<double> scores;
    int n_time = 0;
    int n_freq = 0;
    std::vector<double> freq_axis_hz;
    std::vector<double> time_axis_s;
    StftParams params;

    double at(int t, int k) const { return scores[static_cast<std::size_t>(t) * n_freq + k]; }
};

// The 2-D points handed to the mixture model: (frequency, stability score)
// for one time bin.
struct FeaturePoint {
    double x = 0.0;
    double y = 0.0;
};

struct FeatureSet {
    std::vector<FeaturePoint> points;
    int time_bin = 0;
    int window_len = 0;
};

// hann is the symmetric form, w[0] = w[n-1] = 0 for n > 1; n == 1 gives [1].
std::vector<double> make_window(WindowFn fn, int n);

int time_bins_for(int n_samples, const StftParams& params);
inline int freq_bins_for(int window_len) { return window_len / 2 + 1; }

Spectrogram stft(const Trace& trace, const StftParams& params);

Spectrogram ensemble_mean(std::span<const Spectrogram> spectrograms);
Spectrogram ensemble_variance(std::span<const Spectrogram> spectrograms, const Spectrogram& mean);

StabilityMap stability_map(const Spectrogram& mean, const Spectrogram& variance, double eps);

// Default eps policy: a relative floor tied to the mean magnitudes, so the
// whole pipeline is invariant under rescaling of the input amplitudes.
double default_eps(const Spectrogram& mean, double eps_rel = 1e-12);

FeatureSet extract_features(const StabilityMap& map, int time_bin);

// Debug/interchange dump: first row is the frequency axis, first column the
// time axis, 17 significant digits.
void write_matrix_csv(const std::vector<double>& values, int n_rows, int n_cols,
                      const std::vector<double>& row_axis, const std::vector<double>& col_axis,
                      const std::filesystem::path& file);

}  // namespace emscope::spectral

#endif
