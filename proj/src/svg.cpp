/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "emscope/error.hpp"

namespace emscope::svg {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Five-stop dark-to-light color ramp, linearly interpolated.
std::string color_for(double t) {
    static const int stops[5][3] = {
        {13, 8, 65}, {84, 39, 143}, {187, 55, 84}, {249, 140, 10}, {252, 253, 191}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("FileOpenFailed", "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("FileWriteFailed", "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string render_heatmap(const Heatmap& map) {
    if (map.n_rows < 1 || map.n_cols < 1 ||
        map.values.size() != static_cast<std::size_t>(map.n_rows) * map.n_cols)
        throw Error("InvalidMatrix", "heatmap matrix is not rectangular");

    const double left = 70.0, top = 40.0, right = 30.0, bottom = 50.0;
    const double plot_w = 800.0, plot_h = 480.0;
    const double width = left + plot_w + right, height = top + plot_h + bottom;
    const double cw = plot_w / map.n_rows;   // rows -> x
    const double ch = plot_h / map.n_cols;   // cols -> y

    const auto [min_it, max_it] = std::minmax_element(map.values.begin(), map.values.end());
    const double vmin = *min_it, vmax = *max_it;
    const bool flat = !(vmax > vmin);

    std::string s;
    s.reserve(map.values.size() * 64 + 2048);
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) +
         "\" height=\"" + fmt("%.0f", height) + "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " +
         fmt("%.0f", height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt("%.1f", left) + "\" y=\"24\" font-family=\"monospace\" font-size=\"16\">" +
         escape(map.title) + "</text>\n";

    for (int r = 0; r < map.n_rows; ++r) {
        for (int c = 0; c < map.n_cols; ++c) {
            const double v = map.values[static_cast<std::size_t>(r) * map.n_cols + c];
            const double t = flat ? 0.5 : (v - vmin) / (vmax - vmin);
            const double x = left + r * cw;
            const double y = top + plot_h - (c + 1) * ch;
            s += "<rect x=\"" + fmt("%.3f", x) + "\" y=\"" + fmt("%.3f", y) + "\" width=\"" +
                 fmt("%.3f", cw + 0.05) + "\" height=\"" + fmt("%.3f", ch + 0.05) + "\" fill=\"" +
                 color_for(t) + "\"/>\n";
        }
    }

    // Axis ticks: first, middle, last.
    auto tick_indices = [](int n) {
        std::vector<int> idx{0};
        if (n > 2) idx.push_back(n / 2);
        if (n > 1) idx.push_back(n - 1);
        return idx;
    };
    for (int r : tick_indices(map.n_rows)) {
        const double x = left + (r + 0.5) * cw;
        s += "<text x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", top + plot_h + 18.0) +
             "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" +
             fmt("%.4g", map.row_axis.empty() ? r : map.row_axis[static_cast<std::size_t>(r)]) +
             "</text>\n";
    }
    for (int c : tick_indices(map.n_cols)) {
        const double y = top + plot_h - (c + 0.5) * ch;
        s += "<text x=\"" + fmt("%.1f", left - 6.0) + "\" y=\"" + fmt("%.1f", y + 4.0) +
             "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" +
             fmt("%.4g", map.col_axis.empty() ? c : map.col_axis[static_cast<std::size_t>(c)]) +
             "</text>\n";
    }
    s += "<text x=\"" + fmt("%.1f", left + plot_w / 2.0) + "\" y=\"" + fmt("%.1f", height - 12.0) +
         "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">" +
         escape(map.row_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt("%.1f", top + plot_h / 2.0) +
         "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt("%.1f", top + plot_h / 2.0) + ")\">" + escape(map.col_label) + "</text>\n";

    std::string scale_note = "min=" + fmt("%.6g", vmin) + " max=" + fmt("%.6g", vmax);
    if (flat) scale_note += " (flat: degenerate input)";
    s += "<text x=\"" + fmt("%.1f", left + plot_w) +
         "\" y=\"24\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" + scale_note +
         "</text>\n";
    s += "</svg>\n";
    return s;
}

void render_heatmap_svg(const Heatmap& map, const std::filesystem::path& out) {
    write_file_atomic(out, render_heatmap(map));
}

std::string render_profile(const std::vector<ProfileSeries>& series) {
    if (series.empty()) throw Error("EmptyInput", "no series to plot");
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    int x_min = series[0].points.front().first, x_max = x_min;
    double y_max = 1.0;
    for (const auto& s : series) {
        if (s.points.empty()) throw Error("EmptyInput", "series '" + s.label + "' has no points");
        for (const auto& [w, k] : s.points) {
            x_min = std::min(x_min, w);
            x_max = std::max(x_max, w);
            y_max = std::max(y_max, k);
        }
    }
    y_max = std::ceil(y_max) + 1.0;
    const double x_span = x_max > x_min ? static_cast<double>(x_max - x_min) : 1.0;

    const double left = 60.0, top = 30.0, right = 30.0, bottom = 50.0;
    const double plot_w = 640.0, plot_h = 360.0;
    const double width = left + plot_w + right, height = top + plot_h + bottom;
    auto px = [&](int w) {
        return left + (x_max > x_min ? (w - x_min) / x_span : 0.5) * plot_w;
    };
    auto py = [&](double k) { return top + plot_h - (k / y_max) * plot_h; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
         fmt("%.0f", height) + "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", height) +
         "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top + plot_h) + "\" x2=\"" +
         fmt("%.1f", left + plot_w) + "\" y2=\"" + fmt("%.1f", top + plot_h) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top) + "\" x2=\"" +
         fmt("%.1f", left) + "\" y2=\"" + fmt("%.1f", top + plot_h) + "\" stroke=\"black\"/>\n";

    for (int k = 0; k <= static_cast<int>(y_max); ++k) {
        const double y = py(k);
        s += "<line x1=\"" + fmt("%.1f", left - 4.0) + "\" y1=\"" + fmt("%.1f", y) + "\" x2=\"" +
             fmt("%.1f", left) + "\" y2=\"" + fmt("%.1f", y) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.1f", left - 8.0) + "\" y=\"" + fmt("%.1f", y + 4.0) +
             "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" + std::to_string(k) +
             "</text>\n";
    }
    for (const auto& s0 : series[0].points) {
        const double x = px(s0.first);
        s += "<line x1=\"" + fmt("%.1f", x) + "\" y1=\"" + fmt("%.1f", top + plot_h) + "\" x2=\"" +
             fmt("%.1f", x) + "\" y2=\"" + fmt("%.1f", top + plot_h + 4.0) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", top + plot_h + 18.0) +
             "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" +
             std::to_string(s0.first) + "</text>\n";
    }

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % 4];
        if (series[i].points.size() > 1) {
            std::string pts;
            for (const auto& [w, k] : series[i].points)
                pts += fmt("%.2f", px(w)) + "," + fmt("%.2f", py(k)) + " ";
            s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                 "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        }
        for (const auto& [w, k] : series[i].points) {
            s += "<circle cx=\"" + fmt("%.2f", px(w)) + "\" cy=\"" + fmt("%.2f", py(k)) +
                 "\" r=\"4\" fill=\"" + color + "\"/>\n";
        }
    }

    if (series.size() > 1) {
        const double lx = left + plot_w - 180.0;
        double ly = top + 10.0;
        s += "<rect x=\"" + fmt("%.1f", lx - 10.0) + "\" y=\"" + fmt("%.1f", ly - 14.0) +
             "\" width=\"190\" height=\"" + fmt("%.1f", 20.0 * series.size() + 8.0) +
             "\" fill=\"white\" stroke=\"black\"/>\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            s += "<circle cx=\"" + fmt("%.1f", lx) + "\" cy=\"" + fmt("%.1f", ly) +
                 "\" r=\"4\" fill=\"" + palette[i % 4] + "\"/>\n";
            s += "<text x=\"" + fmt("%.1f", lx + 10.0) + "\" y=\"" + fmt("%.1f", ly + 4.0) +
                 "\" font-family=\"monospace\" font-size=\"12\">" + escape(series[i].label) +
                 "</text>\n";
            ly += 20.0;
        }
    }

    s += "<text x=\"" + fmt("%.1f", left + plot_w / 2.0) + "\" y=\"" + fmt("%.1f", height - 10.0) +
         "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">STFT window size "
         "[samples]</text>\n";
    s += "<text x=\"16\" y=\"" + fmt("%.1f", top + plot_h / 2.0) +
         "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 " +
         fmt("%.1f", top + plot_h / 2.0) + ")\">median GMM components</text>\n";
    s += "</svg>\n";
    return s;
}

void render_profile_svg(const std::vector<ProfileSeries>& series, const std::filesystem::path& out) {
    write_file_atomic(out, render_profile(series));
}

}  // namespace emscope::svg
