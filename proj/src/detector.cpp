/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/detector.hpp"

#include <algorithm>
#include <cmath>

#include "emscope/error.hpp"
#include "emscope/parallel.hpp"

namespace emscope::detect {

const char* to_string(Decision d) {
    switch (d) {
        case Decision::ht_suspected: return "ht_suspected";
        case Decision::ht_free_consistent: return "ht_free_consistent";
        case Decision::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

double lower_median(std::vector<double> values) {
    if (values.empty()) throw Error("EmptyInput", "median of empty set");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

int lower_median_int(std::vector<int> values) {
    if (values.empty()) throw Error("EmptyInput", "median of empty set");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

WindowScale analyze_window_size(const TraceSet& ts, int window_len, const SweepConfig& cfg) {
    if (ts.traces.size() < 2) throw Error("TooFewTraces", "ensemble needs >= 2 traces");

    spectral::StftParams params;
    params.window_len = window_len;
    params.hop = window_len / 2;
    params.window_fn = cfg.window_fn;

    // Per-trace transforms run in parallel; the ensemble reduction is a fixed
    // fold in trace order so the result is independent of scheduling.
    std::vector<spectral::Spectrogram> specs(ts.traces.size());
    parallel_for(ts.traces.size(), [&](std::size_t i) { specs[i] = spectral::stft(ts.traces[i], params); });

    const auto mean = spectral::ensemble_mean(specs);
    const auto variance = spectral::ensemble_variance(specs, mean);
    specs.clear();
    specs.shrink_to_fit();
    const auto map = spectral::stability_map(mean, variance, spectral::default_eps(mean, cfg.stability_eps_rel));

    WindowScale scale;
    scale.window_len = window_len;
    scale.hop = params.hop;
    scale.n_time_bins = map.n_time;
    scale.n_freq_bins = map.n_freq;
    scale.bins.resize(static_cast<std::size_t>(map.n_time));

    parallel_for(static_cast<std::size_t>(map.n_time), [&](std::size_t t) {
        BinResult& bin = scale.bins[t];
        bin.time_bin = static_cast<int>(t);
        const auto features = spectral::extract_features(map, static_cast<int>(t));
        std::vector<gmm::Vec2> pts(features.points.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            pts[i] = {features.points[i].x, features.points[i].y};
        // Every (window size, time bin) pair owns an independent seed so the
        // sweep is reproducible under any parallel schedule.
        gmm::FitConfig fit = cfg.fit;
        fit.seed = combine_seed(combine_seed(cfg.fit.seed, static_cast<std::uint64_t>(window_len)),
                                static_cast<std::uint64_t>(t));
        try {
            auto [std_pts, transform] = gmm::standardize(pts);
            auto selection = gmm::select_order(std_pts, fit);
            bin.model = gmm::to_original_units(selection.best, transform);
            bin.model.bic = selection.best.bic;
            bin.bic_table = std::move(selection.table);
        } catch (const Error&) {
            bin.skipped = true;
        }
    });

    std::vector<int> ks;
    for (const auto& bin : scale.bins) {
        if (bin.skipped) {
            ++scale.skipped_bins;
        } else {
            ks.push_back(bin.model.k);
        }
    }
    if (ks.empty())
        throw Error("AllBinsSkipped",
                    "no time bin produced a feasible mixture at window " + std::to_string(window_len));
    scale.k_distribution = ks;
    scale.median_k = lower_median_int(ks);
    return scale;
}

ScaleProfile scale_sweep(const TraceSet& ts, const SweepConfig& cfg) {
    if (cfg.window_sizes.empty()) throw Error("InvalidConfig", "window_sizes must be non-empty");
    for (std::size_t i = 1; i < cfg.window_sizes.size(); ++i) {
        if (cfg.window_sizes[i] <= cfg.window_sizes[i - 1])
            throw Error("InvalidConfig", "window_sizes must be strictly increasing");
    }
    ScaleProfile profile;
    profile.label = ts.label;
    for (int w : cfg.window_sizes) profile.windows.push_back(analyze_window_size(ts, w, cfg));
    return profile;
}

namespace {

// Quartiles with the same lower-median convention applied to the sorted
// halves; the middle element of an odd-length list belongs to neither half.
std::pair<double, double> quartiles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const std::size_t half = n / 2;
    std::vector<double> lower(values.begin(), values.begin() + half);
    std::vector<double> upper(values.end() - half, values.end());
    if (lower.empty()) return {values.front(), values.back()};
    return {lower_median(lower), lower_median(upper)};
}

}  // namespace

Verdict decide(const ScaleProfile& profile, const Thresholds& thresholds) {
    Verdict verdict;
    verdict.thresholds = thresholds;
    if (profile.windows.empty()) throw Error("EmptyInput", "profile has no window sizes");

    std::vector<double> medians;
    for (const auto& w : profile.windows) medians.push_back(w.median_k);
    const auto [min_it, max_it] = std::minmax_element(medians.begin(), medians.end());
    verdict.range_stat = *max_it - *min_it;
    verdict.median_of_medians = lower_median(medians);
    if (medians.size() >= 2) {
        const auto [q1, q3] = quartiles(medians);
        verdict.iqr_stat = q3 - q1;
    }

    if (profile.windows.size() < 3) {
        verdict.decision = Decision::indeterminate;
        return verdict;
    }
    if (verdict.range_stat <= thresholds.range_max_ht &&
        verdict.median_of_medians <= thresholds.median_max_ht) {
        verdict.decision = Decision::ht_suspected;
    } else if (verdict.range_stat >= thresholds.range_min_free) {
        verdict.decision = Decision::ht_free_consistent;
    } else {
        verdict.decision = Decision::indeterminate;
    }
    return verdict;
}

}  // namespace emscope::detect
