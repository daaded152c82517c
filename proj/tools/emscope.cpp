/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "emscope/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"emscope - reference-free always-on hardware Trojan detection from EM trace "
                 "ensembles"};
    app.require_subcommand(1);

    emscope::cli::SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic EM trace ensemble");
    synth->add_option("config", synth_args.config, "SynthConfig JSON file")->required();
    synth->add_option("outdir", synth_args.out_dir, "output directory for CSV traces")->required();
    synth->add_flag("--ht", synth_args.with_ht, "include the config's Trojan leakage block");
    synth->add_flag("--with-time", synth_args.with_time, "write a time column in each CSV");

    emscope::cli::SweepArgs sweep_args;
    std::string sweep_config, sweep_report, sweep_plots;
    auto* sweep = app.add_subcommand("sweep", "run the multi-window detection pipeline");
    sweep->add_option("tracedir", sweep_args.trace_dir, "directory of trace CSVs")->required();
    sweep->add_option("config", sweep_config, "SweepConfig JSON file (defaults used if omitted)");
    sweep->add_option("--report", sweep_report, "write the JSON report here");
    sweep->add_option("--plots", sweep_plots, "write SVG plots into this directory");
    sweep->add_flag("--timing", sweep_args.timing, "include wall-clock timing in the report");
    sweep->add_flag("--full-tables", sweep_args.full_tables,
                    "include the per-k BIC table for every time bin");

    emscope::cli::SpectrogramArgs spec_args;
    auto* spectrogram =
        app.add_subcommand("spectrogram", "render mean/variance/stability maps for one window size");
    spectrogram->add_option("tracedir", spec_args.trace_dir, "directory of trace CSVs")->required();
    spectrogram->add_option("--window", spec_args.window_len, "STFT window length in samples")
        ->required();
    spectrogram->add_option("--out", spec_args.out_dir, "output directory")->required();

    emscope::cli::CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "overlay two sweep reports in one profile chart");
    compare->add_option("report_a", compare_args.report_a, "first report JSON")->required();
    compare->add_option("report_b", compare_args.report_b, "second report JSON")->required();
    compare->add_option("--out", compare_args.out_svg, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) return emscope::cli::run_synth(synth_args, std::cout, std::cerr);
    if (sweep->parsed()) {
        if (!sweep_config.empty()) sweep_args.config = sweep_config;
        if (!sweep_report.empty()) sweep_args.report = sweep_report;
        if (!sweep_plots.empty()) sweep_args.plots_dir = sweep_plots;
        return emscope::cli::run_sweep(sweep_args, std::cout, std::cerr);
    }
    if (spectrogram->parsed()) return emscope::cli::run_spectrogram(spec_args, std::cout, std::cerr);
    if (compare->parsed()) return emscope::cli::run_compare(compare_args, std::cout, std::cerr);
    return emscope::cli::kExitInputError;
}
