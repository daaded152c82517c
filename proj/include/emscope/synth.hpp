/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EMSCOPE_SYNTH_HPP
#define EMSCOPE_SYNTH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emscope/trace.hpp"

namespace emscope::synth {

struct Carrier {
    double freq_hz = 0.0;
    double amp = 0.0;
};

// One operational mode of the simulated circuit: while a mode is active the
// trace carries the sum of its carriers for dwell_samples samples.
struct Mode {
    std::vector<Carrier> carriers;
    int dwell_samples = 0;
};

// Always-on CDMA leakage circuit: a chip sequence derived from the plaintext
// seed sign-modulates the key bits onto a carrier. The load is modeled as a
// bank of flip-flops; amplitude scales linearly with n_load_ffs / 8.
struct HtConfig {
    std::array<std::uint8_t, 16> key_bits{};  // 128 bits, LSB-first per byte
    std::uint64_t plaintext_seed = 0;
    double chip_rate_hz = 0.0;
    double carrier_hz = 0.0;
    double amp = 0.0;
    int n_load_ffs = 8;
};

struct SynthConfig {
    int n_traces = 0;
    int n_samples = 0;
    double sample_rate_hz = 0.0;
    double clock_freq_hz = 0.0;
    double clock_amp = 0.0;
    std::vector<Mode> modes;
    double noise_sigma = 0.0;
    std::uint64_t master_seed = 1;
    std::optional<HtConfig> ht;
};

// Throws Error naming the violated invariant (Nyquist bounds, empty modes,
// nonpositive dimensions, ...).
void validate(const SynthConfig& cfg);

// Deterministic +/-1 sequence: chip i is the sign of the i-th uniform draw
// from Prng(seed) thresholded at 0.5. Seed 0 is remapped, never an error.
std::vector<int> cdma_chip_sequence(std::uint64_t seed, std::size_t length);

bool key_bit(const std::array<std::uint8_t, 16>& key, unsigned bit_index);

// Per-sample leakage amp_eff * chip(c) * keysign(c mod 128) * cos(2*pi*f_c*t)
// with c = floor(t * chip_rate). Identical for every trace in an ensemble.
std::vector<double> ht_leakage_signal(const HtConfig& cfg, int n_samples, double sample_rate_hz);

// One trace: clock tone + per-dwell-window mode carriers + white noise +
// the shared leakage term. The per-trace generator is seeded with
// mix_seed(master_seed, trace_index); mode choices are drawn as the schedule
// is laid out, then noise one gaussian per sample, in that order.
Trace synth_trace(const SynthConfig& cfg, int trace_index, const std::vector<double>* shared_ht);

TraceSet synth_traceset(const SynthConfig& cfg);

// JSON round-trip. 64-bit seeds travel as decimal strings, key bits as a
// 32-char hex string (byte 0 first, LSB-first within each byte).
SynthConfig config_from_json(const std::string& json_text);
SynthConfig load_config(const std::filesystem::path& file);
std::string config_to_json(const SynthConfig& cfg);

// The frozen desk-scale configuration used by the end-to-end experiment.
SynthConfig desk_config();

}  // namespace emscope::synth

#endif
