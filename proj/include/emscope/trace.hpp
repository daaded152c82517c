/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_TRACE_HPP
#define EMSCOPE_TRACE_HPP

#include <string>
#include <vector>

namespace emscope {

// One captured waveform. Samples are unit-agnostic amplitudes.
struct Trace {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
};

// An aligned ensemble of traces: all the same length, same sample rate.
struct TraceSet {
    std::vector<Trace> traces;
    std::string label = "unknown";

    std::size_t n_traces() const { return traces.size(); }
    std::size_t n_samples() const { return traces.empty() ? 0 : traces.front().samples.size(); }
    double sample_rate_hz() const { return traces.empty() ? 0.0 : traces.front().sample_rate_hz; }
};

struct ValidationReport {
    std::size_t n_traces = 0;
    std::size_t n_samples = 0;
    double sample_rate_hz = 0.0;
    std::vector<std::string> issues;
};

}  // namespace emscope

#endif
