/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_CSV_HPP
#define EMSCOPE_CSV_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emscope/trace.hpp"

namespace emscope::io {

// Oscilloscope CSV dialect: comma separated, optional double-quoted cells.
// Rows whose value cell (and time cell, when used) does not parse as a number
// are tolerated before the first numeric row (PicoScope-style name/unit
// headers) and rejected afterwards.
struct CsvOptions {
    std::optional<int> time_column;  // when set, rate = 1 / median(dt)
    int value_column = 0;
    std::optional<double> sample_rate_override;
};

Trace parse_csv_trace(std::istream& text, const CsvOptions& opts);
Trace parse_csv_trace(const std::string& text, const CsvOptions& opts);
Trace load_trace_csv(const std::filesystem::path& file, const CsvOptions& opts);

struct LoadedTraceSet {
    TraceSet set;
    int truncated_count = 0;          // traces longer than the common length
    std::vector<std::string> warnings;  // per-file parse failures, truncations
};

// Loads every *.csv under dir (non-recursive), ordered by filename. Traces
// are truncated to the minimum common length so the ensemble is rectangular.
LoadedTraceSet load_trace_dir(const std::filesystem::path& dir, const CsvOptions& opts);

ValidationReport validate_traceset(const TraceSet& ts);

// Writes samples with 17 significant digits so a parse round-trips exactly.
// with_time adds a leading time column (i / sample_rate).
void write_trace_csv(const Trace& trace, const std::filesystem::path& file, bool with_time);

}  // namespace emscope::io

#endif
