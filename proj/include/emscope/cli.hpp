/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_CLI_HPP
#define EMSCOPE_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "emscope/csv.hpp"
#include "emscope/detector.hpp"

namespace emscope::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitPipelineError = 3;

// Sweep configuration as read from JSON: pipeline knobs plus the CSV dialect
// options used when the trace directory carries no manifest.
struct SweepSettings {
    detect::SweepConfig sweep;
    io::CsvOptions csv{std::nullopt, 1, std::nullopt};
};

SweepSettings default_sweep_settings();
SweepSettings sweep_settings_from_json(const std::string& json_text);
std::string sweep_settings_to_json(const SweepSettings& settings);

struct SynthArgs {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    bool with_ht = false;
    bool with_time = false;  // also emit a time column in each CSV
};

struct SweepArgs {
    std::filesystem::path trace_dir;
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> plots_dir;
    bool timing = false;       // adds wall-clock metadata (reports stop being run-reproducible)
    bool full_tables = false;  // adds the per-k BIC table for every time bin
};

struct SpectrogramArgs {
    std::filesystem::path trace_dir;
    int window_len = 200;
    std::filesystem::path out_dir;
};

struct CompareArgs {
    std::filesystem::path report_a;
    std::filesystem::path report_b;
    std::filesystem::path out_svg;
};

int run_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int run_spectrogram(const SpectrogramArgs& args, std::ostream& out, std::ostream& err);
int run_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

}  // namespace emscope::cli

#endif
