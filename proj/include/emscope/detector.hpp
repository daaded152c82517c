/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_DETECTOR_HPP
#define EMSCOPE_DETECTOR_HPP

#include <string>
#include <vector>

#include "emscope/gmm.hpp"
#include "emscope/spectral.hpp"
#include "emscope/trace.hpp"

namespace emscope::detect {

struct Thresholds {
    double range_max_ht = 1.0;    // range of medians at or below this ...
    double median_max_ht = 4.0;   // ... and median of medians at or below this => suspected
    double range_min_free = 3.0;  // range at or above this => consistent with HT-free
};

struct SweepConfig {
    std::vector<int> window_sizes{120, 160, 200, 240, 280, 320, 360, 400, 440, 480};
    // STFT overlap is fixed at 50%: hop = window_len / 2.
    gmm::FitConfig fit;
    double stability_eps_rel = 1e-12;
    spectral::WindowFn window_fn = spectral::WindowFn::hann;
    Thresholds thresholds;
};

// Per-time-bin outcome at one window size.
struct BinResult {
    int time_bin = 0;
    bool skipped = false;
    gmm::GmmModel model;  // in original (Hz, score) units
    std::vector<gmm::SelectionEntry> bic_table;
};

struct WindowScale {
    int window_len = 0;
    int hop = 0;
    int n_time_bins = 0;
    int n_freq_bins = 0;
    double median_k = 0.0;
    std::vector<int> k_distribution;  // selected k per non-skipped time bin, in time order
    int skipped_bins = 0;
    std::vector<BinResult> bins;
};

struct ScaleProfile {
    std::string label;
    std::vector<WindowScale> windows;
};

enum class Decision { ht_suspected, ht_free_consistent, indeterminate };

const char* to_string(Decision d);

struct Verdict {
    Decision decision = Decision::indeterminate;
    double range_stat = 0.0;
    double iqr_stat = 0.0;
    double median_of_medians = 0.0;
    Thresholds thresholds;
};

// Lower-median: sorted middle element for odd counts, the lower of the two
// middles for even counts. Keeps every statistic an achievable integer k.
double lower_median(std::vector<double> values);
int lower_median_int(std::vector<int> values);

WindowScale analyze_window_size(const TraceSet& ts, int window_len, const SweepConfig& cfg);

ScaleProfile scale_sweep(const TraceSet& ts, const SweepConfig& cfg);

Verdict decide(const ScaleProfile& profile, const Thresholds& thresholds);

}  // namespace emscope::detect

#endif
