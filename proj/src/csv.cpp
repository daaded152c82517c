/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "emscope/error.hpp"

namespace emscope::io {

namespace {

// Splits one CSV line. Quotes only group characters (PicoScope quotes unit
// rows); escaped quotes inside cells are not part of the dialect.
std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::optional<double> parse_number(const std::string& cell) {
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t' || *(e - 1) == '\r')) --e;
    if (b == e) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

bool blank_row(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

Trace parse_csv_trace(std::istream& text, const CsvOptions& opts) {
    if (opts.value_column < 0) throw Error("InvalidCsvOptions", "value_column must be >= 0");
    if (opts.time_column && *opts.time_column < 0)
        throw Error("InvalidCsvOptions", "time_column must be >= 0");
    if (opts.sample_rate_override && *opts.sample_rate_override <= 0.0)
        throw Error("InvalidCsvOptions", "sample_rate_override must be > 0");

    std::vector<double> values;
    std::vector<double> times;
    std::string line;
    std::size_t row = 0;
    bool data_started = false;
    while (std::getline(text, line)) {
        ++row;
        if (blank_row(line)) continue;
        const auto cells = split_row(line);
        const int max_col = std::max(opts.value_column, opts.time_column.value_or(0));
        std::optional<double> value;
        std::optional<double> time;
        if (max_col < static_cast<int>(cells.size())) {
            value = parse_number(cells[opts.value_column]);
            if (opts.time_column) time = parse_number(cells[*opts.time_column]);
        }
        const bool numeric = value && (!opts.time_column || time);
        if (!numeric) {
            if (data_started)
                throw Error("NonNumericRow",
                            "row " + std::to_string(row) + " is not numeric after data began");
            continue;  // header/unit prefix
        }
        data_started = true;
        values.push_back(*value);
        if (opts.time_column) times.push_back(*time);
    }
    if (values.empty()) throw Error("NoNumericRows", "no numeric rows found");

    Trace trace;
    trace.samples = std::move(values);
    if (opts.time_column) {
        if (times.size() < 2)
            throw Error("NonUniformTimebase", "need at least 2 rows to infer a sample rate");
        std::vector<double> dts(times.size() - 1);
        for (std::size_t i = 0; i + 1 < times.size(); ++i) dts[i] = times[i + 1] - times[i];
        const double med = lower_median(dts);
        if (!(med > 0.0)) throw Error("NonUniformTimebase", "time column is not increasing");
        for (std::size_t i = 0; i < dts.size(); ++i) {
            if (std::abs(dts[i] - med) > 0.01 * med)
                throw Error("NonUniformTimebase",
                            "dt at step " + std::to_string(i) + " deviates from median by >1%");
        }
        trace.sample_rate_hz = 1.0 / med;
    } else if (opts.sample_rate_override) {
        trace.sample_rate_hz = *opts.sample_rate_override;
    } else {
        throw Error("MissingSampleRate", "no time column and no sample_rate_override");
    }
    return trace;
}

Trace parse_csv_trace(const std::string& text, const CsvOptions& opts) {
    std::istringstream in(text);
    return parse_csv_trace(in, opts);
}

Trace load_trace_csv(const std::filesystem::path& file, const CsvOptions& opts) {
    std::ifstream in(file);
    if (!in) throw Error("FileOpenFailed", "cannot open " + file.string());
    return parse_csv_trace(in, opts);
}

LoadedTraceSet load_trace_dir(const std::filesystem::path& dir, const CsvOptions& opts) {
    if (!std::filesystem::is_directory(dir))
        throw Error("NotADirectory", dir.string() + " is not a directory");

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".csv") files.push_back(entry.path());
    }
    // Ordering is a pure function of the names, never of enumeration order.
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
        return a.filename().string() < b.filename().string();
    });

    LoadedTraceSet result;
    for (const auto& file : files) {
        try {
            result.set.traces.push_back(load_trace_csv(file, opts));
        } catch (const Error& e) {
            result.warnings.push_back(file.filename().string() + ": " + e.what());
        }
    }
    if (result.set.traces.size() < 2)
        throw Error("TooFewTraces", "need >= 2 parseable CSV files, got " +
                                        std::to_string(result.set.traces.size()));

    double rate_min = result.set.traces.front().sample_rate_hz;
    double rate_max = rate_min;
    std::size_t min_len = result.set.traces.front().samples.size();
    for (const auto& t : result.set.traces) {
        rate_min = std::min(rate_min, t.sample_rate_hz);
        rate_max = std::max(rate_max, t.sample_rate_hz);
        min_len = std::min(min_len, t.samples.size());
    }
    if ((rate_max - rate_min) > 0.001 * rate_min)
        throw Error("InconsistentSampleRate", "sample rates differ by more than 0.1%");
    for (auto& t : result.set.traces) {
        if (t.samples.size() > min_len) {
            t.samples.resize(min_len);
            ++result.truncated_count;
        }
    }
    if (result.truncated_count > 0)
        result.warnings.push_back(std::to_string(result.truncated_count) +
                                  " trace(s) truncated to common length " +
                                  std::to_string(min_len));
    return result;
}

ValidationReport validate_traceset(const TraceSet& ts) {
    ValidationReport report;
    report.n_traces = ts.n_traces();
    report.n_samples = ts.n_samples();
    report.sample_rate_hz = ts.sample_rate_hz();
    if (ts.traces.size() < 2) report.issues.push_back("fewer than 2 traces");
    for (std::size_t i = 0; i < ts.traces.size(); ++i) {
        const auto& t = ts.traces[i];
        if (t.samples.size() != report.n_samples)
            report.issues.push_back("trace " + std::to_string(i) + ": length mismatch");
        if (t.sample_rate_hz != report.sample_rate_hz)
            report.issues.push_back("trace " + std::to_string(i) + ": sample rate mismatch");
        if (t.samples.empty()) {
            report.issues.push_back("trace " + std::to_string(i) + ": empty");
            continue;
        }
        bool constant = true;
        for (std::size_t j = 0; j < t.samples.size(); ++j) {
            if (!std::isfinite(t.samples[j]))
                report.issues.push_back("trace " + std::to_string(i) + ": non-finite sample at index " +
                                        std::to_string(j));
            if (t.samples[j] != t.samples.front()) constant = false;
        }
        if (constant) report.issues.push_back("trace " + std::to_string(i) + ": constant trace");
    }
    return report;
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& file, bool with_time) {
    std::ofstream out(file);
    if (!out) throw Error("FileOpenFailed", "cannot open " + file.string() + " for writing");
    char buf[64];
    std::string line;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        line.clear();
        if (with_time) {
            std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(i) / trace.sample_rate_hz);
            line += buf;
            line += ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", trace.samples[i]);
        line += buf;
        line += '\n';
        out << line;
    }
    if (!out) throw Error("FileWriteFailed", "short write to " + file.string());
}

}  // namespace emscope::io
