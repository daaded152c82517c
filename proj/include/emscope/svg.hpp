/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_SVG_HPP
#define EMSCOPE_SVG_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace emscope::svg {

// Row-major heatmap; rows map to x (time), columns to y (frequency, low at
// the bottom). Output is plain text with fixed formatting, so identical
// inputs give identical bytes.
struct Heatmap {
    std::vector<double> values;
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> row_axis;
    std::vector<double> col_axis;
    std::string title;
    std::string row_label = "time [s]";
    std::string col_label = "frequency [Hz]";
};

std::string render_heatmap(const Heatmap& map);
void render_heatmap_svg(const Heatmap& map, const std::filesystem::path& out);

struct ProfileSeries {
    std::string label;
    std::vector<std::pair<int, double>> points;  // (window size, median k)
};

std::string render_profile(const std::vector<ProfileSeries>& series);
void render_profile_svg(const std::vector<ProfileSeries>& series, const std::filesystem::path& out);

// Shared atomic write helper (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace emscope::svg

#endif
