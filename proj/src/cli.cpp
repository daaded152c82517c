/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "emscope/error.hpp"
#include "emscope/parallel.hpp"
#include "emscope/svg.hpp"
#include "emscope/synth.hpp"
#include "json_util.hpp"

namespace emscope::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("FileOpenFailed", "cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw Error("InvalidConfig", file.string() + ": " + e.what());
    }
}

std::string format_stat(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

io::CsvOptions csv_options_from_json(const json& j) {
    io::CsvOptions opts{std::nullopt, 1, std::nullopt};
    if (j.contains("time_column") && !j.at("time_column").is_null())
        opts.time_column = j.at("time_column").get<int>();
    else
        opts.time_column.reset();
    if (j.contains("value_column")) opts.value_column = j.at("value_column").get<int>();
    if (j.contains("sample_rate_override") && !j.at("sample_rate_override").is_null())
        opts.sample_rate_override = j.at("sample_rate_override").get<double>();
    return opts;
}

ordered_json csv_options_to_json(const io::CsvOptions& opts) {
    ordered_json j;
    if (opts.time_column)
        j["time_column"] = *opts.time_column;
    else
        j["time_column"] = nullptr;
    j["value_column"] = opts.value_column;
    if (opts.sample_rate_override)
        j["sample_rate_override"] = *opts.sample_rate_override;
    else
        j["sample_rate_override"] = nullptr;
    return j;
}

// manifest.json describes how a generated directory should be read back:
// exact sample rate, value column, and the ensemble label.
struct Manifest {
    std::string label = "unknown";
    io::CsvOptions csv;
};

std::optional<Manifest> read_manifest(const std::filesystem::path& dir) {
    const auto file = dir / "manifest.json";
    if (!std::filesystem::exists(file)) return std::nullopt;
    const json j = parse_json_file(file);
    Manifest m;
    m.label = j.value("label", "unknown");
    if (j.contains("csv")) m.csv = csv_options_from_json(j.at("csv"));
    return m;
}

}  // namespace

SweepSettings default_sweep_settings() {
    SweepSettings s;
    s.csv = io::CsvOptions{0, 1, std::nullopt};  // two-column time,value by default
    return s;
}

SweepSettings sweep_settings_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error("InvalidConfig", std::string("JSON parse failure: ") + e.what());
    }
    SweepSettings s = default_sweep_settings();
    try {
        if (j.contains("window_sizes"))
            s.sweep.window_sizes = j.at("window_sizes").get<std::vector<int>>();
        if (j.contains("fit")) {
            const auto& f = j.at("fit");
            auto& fit = s.sweep.fit;
            fit.k_min = f.value("k_min", fit.k_min);
            fit.k_max = f.value("k_max", fit.k_max);
            fit.n_restarts = f.value("n_restarts", fit.n_restarts);
            fit.max_iters = f.value("max_iters", fit.max_iters);
            fit.rel_tol = f.value("rel_tol", fit.rel_tol);
            fit.cov_floor = f.value("cov_floor", fit.cov_floor);
            if (f.contains("seed")) fit.seed = detail::parse_seed(f.at("seed"), "fit.seed");
            if (f.contains("covariance")) {
                const std::string c = f.at("covariance").get<std::string>();
                if (c == "full")
                    fit.covariance = gmm::CovType::full;
                else if (c == "diagonal")
                    fit.covariance = gmm::CovType::diagonal;
                else
                    throw Error("InvalidConfig", "fit.covariance must be full or diagonal");
            }
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            auto& th = s.sweep.thresholds;
            th.range_max_ht = t.value("range_max_ht", th.range_max_ht);
            th.median_max_ht = t.value("median_max_ht", th.median_max_ht);
            th.range_min_free = t.value("range_min_free", th.range_min_free);
        }
        if (j.contains("stability_eps_rel"))
            s.sweep.stability_eps_rel = j.at("stability_eps_rel").get<double>();
        if (j.contains("window_fn")) {
            const std::string w = j.at("window_fn").get<std::string>();
            if (w == "hann")
                s.sweep.window_fn = spectral::WindowFn::hann;
            else if (w == "rectangular")
                s.sweep.window_fn = spectral::WindowFn::rectangular;
            else
                throw Error("InvalidConfig", "window_fn must be hann or rectangular");
        }
        if (j.contains("csv")) s.csv = csv_options_from_json(j.at("csv"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("InvalidConfig", e.what());
    }
    return s;
}

namespace {

ordered_json sweep_settings_json(const SweepSettings& s) {
    ordered_json j;
    j["window_sizes"] = s.sweep.window_sizes;
    j["overlap"] = 0.5;
    j["window_fn"] = s.sweep.window_fn == spectral::WindowFn::hann ? "hann" : "rectangular";
    j["stability_eps_rel"] = s.sweep.stability_eps_rel;
    ordered_json f;
    f["k_min"] = s.sweep.fit.k_min;
    f["k_max"] = s.sweep.fit.k_max;
    f["n_restarts"] = s.sweep.fit.n_restarts;
    f["max_iters"] = s.sweep.fit.max_iters;
    f["rel_tol"] = s.sweep.fit.rel_tol;
    f["cov_floor"] = s.sweep.fit.cov_floor;
    f["seed"] = std::to_string(s.sweep.fit.seed);
    f["covariance"] = s.sweep.fit.covariance == gmm::CovType::full ? "full" : "diagonal";
    j["fit"] = std::move(f);
    ordered_json t;
    t["range_max_ht"] = s.sweep.thresholds.range_max_ht;
    t["median_max_ht"] = s.sweep.thresholds.median_max_ht;
    t["range_min_free"] = s.sweep.thresholds.range_min_free;
    j["thresholds"] = std::move(t);
    j["csv"] = csv_options_to_json(s.csv);
    return j;
}

}  // namespace

std::string sweep_settings_to_json(const SweepSettings& settings) {
    return sweep_settings_json(settings).dump(2) + "\n";
}

int run_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    synth::SynthConfig cfg;
    try {
        cfg = synth::load_config(args.config);
        if (args.with_ht && !cfg.ht)
            throw Error("InvalidConfig", "--ht requested but the config has no ht block");
        if (!args.with_ht) cfg.ht.reset();
        synth::validate(cfg);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        const TraceSet set = synth::synth_traceset(cfg);
        std::filesystem::create_directories(args.out_dir);
        int width = 3;
        for (int v = cfg.n_traces - 1; v >= 1000; v /= 10) ++width;
        char name[32];
        for (std::size_t i = 0; i < set.traces.size(); ++i) {
            std::snprintf(name, sizeof name, "t%0*zu.csv", width, i);
            io::write_trace_csv(set.traces[i], args.out_dir / name, args.with_time);
        }

        ordered_json manifest;
        manifest["tool"] = "emscope";
        manifest["version"] = kToolVersion;
        manifest["label"] = set.label;
        manifest["n_traces"] = cfg.n_traces;
        manifest["n_samples"] = cfg.n_samples;
        manifest["sample_rate_hz"] = cfg.sample_rate_hz;
        manifest["master_seed"] = std::to_string(cfg.master_seed);
        io::CsvOptions read_back{std::nullopt, args.with_time ? 1 : 0, cfg.sample_rate_hz};
        manifest["csv"] = csv_options_to_json(read_back);
        svg::write_file_atomic(args.out_dir / "manifest.json", manifest.dump(2) + "\n");

        out << "wrote " << set.traces.size() << " traces (" << set.label << ") to "
            << args.out_dir.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipelineError;
    }
}

namespace {

ordered_json model_json(const gmm::GmmModel& m) {
    ordered_json j;
    j["k"] = m.k;
    j["log_likelihood"] = m.log_likelihood;
    j["bic"] = m.bic;
    j["converged"] = m.converged;
    j["iters_used"] = m.iters_used;
    j["weights"] = m.weights;
    ordered_json means = ordered_json::array();
    for (const auto& mu : m.means) means.push_back({mu.x, mu.y});
    j["means"] = std::move(means);
    ordered_json covs = ordered_json::array();
    for (const auto& c : m.covariances) covs.push_back({c.xx, c.xy, c.yy});
    j["covariances"] = std::move(covs);
    return j;
}

ordered_json profile_json(const detect::ScaleProfile& profile, bool full_tables) {
    ordered_json windows = ordered_json::array();
    for (const auto& w : profile.windows) {
        ordered_json jw;
        jw["window_len"] = w.window_len;
        jw["hop"] = w.hop;
        jw["n_time_bins"] = w.n_time_bins;
        jw["n_freq_bins"] = w.n_freq_bins;
        jw["median_k"] = w.median_k;
        jw["skipped_bins"] = w.skipped_bins;
        jw["k_distribution"] = w.k_distribution;
        ordered_json bins = ordered_json::array();
        for (const auto& bin : w.bins) {
            ordered_json jb;
            jb["time_bin"] = bin.time_bin;
            if (bin.skipped) {
                jb["skipped"] = true;
            } else {
                jb["model"] = model_json(bin.model);
                if (full_tables) {
                    ordered_json table = ordered_json::array();
                    for (const auto& e : bin.bic_table) {
                        ordered_json je;
                        je["k"] = e.k;
                        if (std::isfinite(e.bic))
                            je["bic"] = e.bic;
                        else
                            je["bic"] = nullptr;
                        je["converged"] = e.converged;
                        je["status"] = e.status;
                        table.push_back(std::move(je));
                    }
                    jb["bic_table"] = std::move(table);
                }
            }
            bins.push_back(std::move(jb));
        }
        jw["bins"] = std::move(bins);
        windows.push_back(std::move(jw));
    }
    return windows;
}

ordered_json verdict_json(const detect::Verdict& v) {
    ordered_json j;
    j["decision"] = detect::to_string(v.decision);
    j["range_stat"] = v.range_stat;
    j["iqr_stat"] = v.iqr_stat;
    j["median_of_medians"] = v.median_of_medians;
    ordered_json t;
    t["range_max_ht"] = v.thresholds.range_max_ht;
    t["median_max_ht"] = v.thresholds.median_max_ht;
    t["range_min_free"] = v.thresholds.range_min_free;
    j["thresholds"] = std::move(t);
    return j;
}

svg::ProfileSeries profile_series(const detect::ScaleProfile& profile, const std::string& label) {
    svg::ProfileSeries s;
    s.label = label;
    for (const auto& w : profile.windows) s.points.emplace_back(w.window_len, w.median_k);
    return s;
}

}  // namespace

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();

    SweepSettings settings;
    io::LoadedTraceSet loaded;
    try {
        settings = args.config ? sweep_settings_from_json([&] {
            std::ifstream in(*args.config);
            if (!in) throw Error("FileOpenFailed", "cannot open " + args.config->string());
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        }())
                               : default_sweep_settings();
        io::CsvOptions csv = settings.csv;
        std::string label = "unknown";
        if (const auto manifest = read_manifest(args.trace_dir)) {
            csv = manifest->csv;
            label = manifest->label;
        }
        loaded = io::load_trace_dir(args.trace_dir, csv);
        loaded.set.label = label;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        const detect::ScaleProfile profile = detect::scale_sweep(loaded.set, settings.sweep);
        const detect::Verdict verdict = detect::decide(profile, settings.sweep.thresholds);

        ordered_json report;
        report["tool"] = "emscope";
        report["version"] = kToolVersion;
        ordered_json input;
        input["kind"] = "csv_dir";
        input["path"] = args.trace_dir.string();
        input["label"] = loaded.set.label;
        input["n_traces"] = loaded.set.n_traces();
        input["n_samples"] = loaded.set.n_samples();
        input["sample_rate_hz"] = loaded.set.sample_rate_hz();
        input["truncated_traces"] = loaded.truncated_count;
        input["warnings"] = loaded.warnings;
        report["input"] = std::move(input);
        report["sweep"] = sweep_settings_json(settings);
        report["windows"] = profile_json(profile, args.full_tables);
        report["verdict"] = verdict_json(verdict);
        if (args.timing) {
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
            report["timing"] = {{"wall_ms", ms}};
        }

        if (args.report) svg::write_file_atomic(*args.report, report.dump(2) + "\n");
        if (args.plots_dir) {
            std::filesystem::create_directories(*args.plots_dir);
            svg::render_profile_svg({profile_series(profile, profile.label)},
                                    *args.plots_dir / "profile.svg");
        }

        out << "verdict=" << detect::to_string(verdict.decision)
            << " range=" << format_stat(verdict.range_stat)
            << " median=" << format_stat(verdict.median_of_medians) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipelineError;
    }
}

int run_spectrogram(const SpectrogramArgs& args, std::ostream& out, std::ostream& err) {
    io::LoadedTraceSet loaded;
    try {
        io::CsvOptions csv{0, 1, std::nullopt};
        std::string label = "unknown";
        if (const auto manifest = read_manifest(args.trace_dir)) {
            csv = manifest->csv;
            label = manifest->label;
        }
        loaded = io::load_trace_dir(args.trace_dir, csv);
        loaded.set.label = label;
        if (args.window_len < 1 ||
            static_cast<std::size_t>(args.window_len) > loaded.set.n_samples())
            throw Error("WindowTooLong", "window " + std::to_string(args.window_len) +
                                             " invalid for trace length " +
                                             std::to_string(loaded.set.n_samples()));
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        spectral::StftParams params{args.window_len, args.window_len / 2, spectral::WindowFn::hann};
        std::vector<spectral::Spectrogram> specs(loaded.set.traces.size());
        parallel_for(specs.size(),
                     [&](std::size_t i) { specs[i] = spectral::stft(loaded.set.traces[i], params); });
        const auto mean = spectral::ensemble_mean(specs);
        const auto variance = spectral::ensemble_variance(specs, mean);
        const auto stability = spectral::stability_map(mean, variance, spectral::default_eps(mean));

        std::filesystem::create_directories(args.out_dir);
        const auto dump = [&](const std::vector<double>& values, const std::string& name,
                              const std::string& title) {
            spectral::write_matrix_csv(values, mean.n_time, mean.n_freq, mean.time_axis_s,
                                       mean.freq_axis_hz, args.out_dir / (name + ".csv"));
            svg::Heatmap h;
            h.values = values;
            h.n_rows = mean.n_time;
            h.n_cols = mean.n_freq;
            h.row_axis = mean.time_axis_s;
            h.col_axis = mean.freq_axis_hz;
            h.title = title + " (" + loaded.set.label + ", window " +
                      std::to_string(args.window_len) + ")";
            svg::render_heatmap_svg(h, args.out_dir / (name + ".svg"));
        };
        dump(mean.values, "mean_spectrogram", "mean magnitude");
        dump(variance.values, "variance_spectrogram", "magnitude variance");
        dump(stability.scores, "stability_map", "stability map");
        out << "wrote spectrogram set to " << args.out_dir.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipelineError;
    }
}

int run_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
    try {
        auto series_from_report = [](const std::filesystem::path& file) {
            const json j = parse_json_file(file);
            svg::ProfileSeries s;
            s.label = j.at("input").value("label", "unknown");
            for (const auto& w : j.at("windows"))
                s.points.emplace_back(w.at("window_len").get<int>(), w.at("median_k").get<double>());
            if (s.points.empty()) throw Error("EmptyInput", file.string() + " has no window results");
            return s;
        };
        auto a = series_from_report(args.report_a);
        auto b = series_from_report(args.report_b);
        if (a.label == b.label) {
            a.label += " (a)";
            b.label += " (b)";
        }
        svg::render_profile_svg({a, b}, args.out_svg);
        out << "wrote " << args.out_svg.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace emscope::cli
