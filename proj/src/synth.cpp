/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "emscope/error.hpp"
#include "emscope/parallel.hpp"
#include "emscope/prng.hpp"
#include "json_util.hpp"

namespace emscope::synth {

using detail::parse_seed;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::array<std::uint8_t, 16> parse_key_hex(const std::string& hex) {
    if (hex.size() != 32) throw Error("InvalidConfig", "key_bits must be 32 hex characters");
    std::array<std::uint8_t, 16> key{};
    for (std::size_t i = 0; i < 16; ++i) {
        const int hi = hex_nibble(hex[2 * i]);
        const int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error("InvalidConfig", "key_bits must be hex");
        key[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return key;
}

std::string key_to_hex(const std::array<std::uint8_t, 16>& key) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(32);
    for (std::uint8_t b : key) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

}  // namespace

void validate(const SynthConfig& cfg) {
    if (cfg.n_traces < 2)
        throw Error("TooFewTraces", "n_traces must be >= 2 (ensemble statistics need variance)");
    if (cfg.n_samples < 1) throw Error("InvalidConfig", "n_samples must be >= 1");
    if (!(cfg.sample_rate_hz > 0.0)) throw Error("InvalidConfig", "sample_rate_hz must be > 0");
    if (cfg.noise_sigma < 0.0) throw Error("InvalidConfig", "noise_sigma must be >= 0");
    const double nyquist = cfg.sample_rate_hz / 2.0;
    if (cfg.clock_freq_hz >= nyquist)
        throw Error("NyquistViolation", "clock_freq_hz must be below sample_rate_hz/2");
    if (cfg.modes.empty()) throw Error("InvalidConfig", "modes must be non-empty");
    for (const auto& mode : cfg.modes) {
        if (mode.dwell_samples < 1 || mode.dwell_samples > cfg.n_samples)
            throw Error("InvalidConfig", "dwell_samples must be in [1, n_samples]");
        for (const auto& c : mode.carriers) {
            if (c.freq_hz >= nyquist)
                throw Error("NyquistViolation", "mode carrier must be below sample_rate_hz/2");
        }
    }
    if (cfg.ht) {
        if (!(cfg.ht->amp > 0.0)) throw Error("InvalidConfig", "ht.amp must be > 0 (always-on)");
        if (!(cfg.ht->chip_rate_hz > 0.0)) throw Error("InvalidConfig", "ht.chip_rate_hz must be > 0");
        if (!(cfg.ht->carrier_hz > 0.0)) throw Error("InvalidConfig", "ht.carrier_hz must be > 0");
        if (cfg.ht->n_load_ffs < 1) throw Error("InvalidConfig", "ht.n_load_ffs must be >= 1");
        if (cfg.ht->carrier_hz + cfg.ht->chip_rate_hz >= nyquist)
            throw Error("NyquistViolation",
                        "ht.carrier_hz + ht.chip_rate_hz must be below sample_rate_hz/2");
    }
}

std::vector<int> cdma_chip_sequence(std::uint64_t seed, std::size_t length) {
    Prng rng(seed);
    std::vector<int> chips(length);
    for (auto& c : chips) c = rng.uniform01() >= 0.5 ? 1 : -1;
    return chips;
}

bool key_bit(const std::array<std::uint8_t, 16>& key, unsigned bit_index) {
    bit_index &= 127;
    return (key[bit_index >> 3] >> (bit_index & 7)) & 1;
}

std::vector<double> ht_leakage_signal(const HtConfig& cfg, int n_samples, double sample_rate_hz) {
    const double amp_eff = cfg.amp * static_cast<double>(cfg.n_load_ffs) / 8.0;
    const double chips_per_sample = cfg.chip_rate_hz / sample_rate_hz;
    const auto last_chip =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_samples - 1) * chips_per_sample));
    const auto chips = cdma_chip_sequence(cfg.plaintext_seed, last_chip + 1);

    std::vector<double> signal(static_cast<std::size_t>(n_samples));
    for (int n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / sample_rate_hz;
        const auto c = static_cast<std::size_t>(std::floor(static_cast<double>(n) * chips_per_sample));
        const int keysign = key_bit(cfg.key_bits, static_cast<unsigned>(c % 128)) ? 1 : -1;
        signal[static_cast<std::size_t>(n)] =
            amp_eff * chips[c] * keysign * std::cos(kTwoPi * cfg.carrier_hz * t);
    }
    return signal;
}

Trace synth_trace(const SynthConfig& cfg, int trace_index, const std::vector<double>* shared_ht) {
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    const double fs = cfg.sample_rate_hz;
    Prng rng(mix_seed(cfg.master_seed, static_cast<std::uint64_t>(trace_index)));

    Trace trace;
    trace.sample_rate_hz = fs;
    trace.samples.assign(n, 0.0);

    // Clock tone.
    if (cfg.clock_amp != 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            trace.samples[i] = cfg.clock_amp * std::cos(kTwoPi * cfg.clock_freq_hz *
                                                        (static_cast<double>(i) / fs));
    }

    // Mode schedule: one uniform draw per dwell window, consumed in layout
    // order. The window length is the chosen mode's dwell.
    std::size_t pos = 0;
    while (pos < n) {
        const double u = rng.uniform01();
        auto m = static_cast<std::size_t>(u * static_cast<double>(cfg.modes.size()));
        if (m >= cfg.modes.size()) m = cfg.modes.size() - 1;
        const Mode& mode = cfg.modes[m];
        const std::size_t end = std::min(n, pos + static_cast<std::size_t>(mode.dwell_samples));
        for (const auto& carrier : mode.carriers) {
            const double w = kTwoPi * carrier.freq_hz;
            for (std::size_t i = pos; i < end; ++i)
                trace.samples[i] += carrier.amp * std::cos(w * (static_cast<double>(i) / fs));
        }
        pos = end;
    }

    // Noise, one draw per sample, after all mode draws.
    if (cfg.noise_sigma > 0.0) {
        for (std::size_t i = 0; i < n; ++i) trace.samples[i] += cfg.noise_sigma * rng.gaussian();
    }

    if (shared_ht) {
        for (std::size_t i = 0; i < n; ++i) trace.samples[i] += (*shared_ht)[i];
    }
    return trace;
}

TraceSet synth_traceset(const SynthConfig& cfg) {
    validate(cfg);
    std::vector<double> leakage;
    if (cfg.ht) leakage = ht_leakage_signal(*cfg.ht, cfg.n_samples, cfg.sample_rate_hz);

    TraceSet set;
    set.label = cfg.ht ? "ht_inserted" : "ht_free";
    set.traces.resize(static_cast<std::size_t>(cfg.n_traces));
    const std::vector<double>* shared = cfg.ht ? &leakage : nullptr;
    parallel_for(set.traces.size(), [&](std::size_t i) {
        set.traces[i] = synth_trace(cfg, static_cast<int>(i), shared);
    });
    return set;
}

SynthConfig config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error("InvalidConfig", std::string("JSON parse failure: ") + e.what());
    }
    SynthConfig cfg;
    try {
        cfg.n_traces = j.at("n_traces").get<int>();
        cfg.n_samples = j.at("n_samples").get<int>();
        cfg.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        cfg.clock_freq_hz = j.at("clock_freq_hz").get<double>();
        cfg.clock_amp = j.at("clock_amp").get<double>();
        for (const auto& jm : j.at("modes")) {
            Mode mode;
            mode.dwell_samples = jm.at("dwell_samples").get<int>();
            for (const auto& jc : jm.at("carriers"))
                mode.carriers.push_back({jc.at("freq_hz").get<double>(), jc.at("amp").get<double>()});
            cfg.modes.push_back(std::move(mode));
        }
        cfg.noise_sigma = j.at("noise_sigma").get<double>();
        cfg.master_seed = parse_seed(j.at("master_seed"), "master_seed");
        if (j.contains("ht") && !j.at("ht").is_null()) {
            const auto& jh = j.at("ht");
            HtConfig ht;
            ht.key_bits = parse_key_hex(jh.at("key_bits").get<std::string>());
            ht.plaintext_seed = parse_seed(jh.at("plaintext_seed"), "plaintext_seed");
            ht.chip_rate_hz = jh.at("chip_rate_hz").get<double>();
            ht.carrier_hz = jh.at("carrier_hz").get<double>();
            ht.amp = jh.at("amp").get<double>();
            ht.n_load_ffs = jh.value("n_load_ffs", 8);
            cfg.ht = ht;
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("InvalidConfig", e.what());
    }
    return cfg;
}

SynthConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("FileOpenFailed", "cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

std::string config_to_json(const SynthConfig& cfg) {
    nlohmann::ordered_json j;
    j["n_traces"] = cfg.n_traces;
    j["n_samples"] = cfg.n_samples;
    j["sample_rate_hz"] = cfg.sample_rate_hz;
    j["clock_freq_hz"] = cfg.clock_freq_hz;
    j["clock_amp"] = cfg.clock_amp;
    j["modes"] = nlohmann::ordered_json::array();
    for (const auto& mode : cfg.modes) {
        nlohmann::ordered_json jm;
        jm["carriers"] = nlohmann::ordered_json::array();
        for (const auto& c : mode.carriers)
            jm["carriers"].push_back({{"freq_hz", c.freq_hz}, {"amp", c.amp}});
        jm["dwell_samples"] = mode.dwell_samples;
        j["modes"].push_back(std::move(jm));
    }
    j["noise_sigma"] = cfg.noise_sigma;
    j["master_seed"] = std::to_string(cfg.master_seed);
    if (cfg.ht) {
        nlohmann::ordered_json jh;
        jh["key_bits"] = key_to_hex(cfg.ht->key_bits);
        jh["plaintext_seed"] = std::to_string(cfg.ht->plaintext_seed);
        jh["chip_rate_hz"] = cfg.ht->chip_rate_hz;
        jh["carrier_hz"] = cfg.ht->carrier_hz;
        jh["amp"] = cfg.ht->amp;
        jh["n_load_ffs"] = cfg.ht->n_load_ffs;
        j["ht"] = std::move(jh);
    }
    return j.dump(2) + "\n";
}

SynthConfig desk_config() {
    SynthConfig cfg;
    cfg.n_traces = 500;
    cfg.n_samples = 16384;
    cfg.sample_rate_hz = 1e8;
    cfg.clock_freq_hz = 1e7;
    cfg.clock_amp = 0.6;
    cfg.noise_sigma = 0.2;
    cfg.master_seed = 1;

    // Eight operational modes spanning several time scales. Strong burst
    // lines (short dwells, low duty) print deep low-stability strata at every
    // window size; weak always-on spurs are tuned so their stability stands
    // out at short windows and sinks into the noise ribbon as the window
    // grows, which is what drives the falling component count of the HT-free
    // profile. Two slow modes drive the 10 MHz clock line so the clock cell
    // carries ensemble variance like the rest of the busy spectrum. All
    // frequencies are multiples of 2.5 MHz (bin-aligned at every sweep window
    // size) and the band around the 23 MHz Trojan carrier stays quiet.
    struct Line {
        double freq_hz;
        double amp;
        std::initializer_list<int> modes;
    };
    // Everything between 16 MHz and 31 MHz stays quiet: strong-line splatter
    // from mode transitions must not reach the covert 23 MHz band, or it
    // would mask the very cell the detector keys on.
    // Six slow modes model sustained activity (bus/memory blocks owning their
    // own frequency regions, plus traffic on the clock line); six fast modes
    // model brief events (interrupt-style bursts, 96 samples long) whose
    // spectral lines are only resolvable at short analysis windows: a longer
    // window dilutes a burst against a noise floor that grows with window
    // length, while steady lines gain. The band around the covert 23 MHz
    // carrier stays quiet.
    const std::initializer_list<Line> lines = {
        // Steady strong lines, one slow mode each: the deep stability band.
        {4.00e7, 1.10, {0}},
        {4.25e7, 1.05, {1}},
        {4.50e7, 1.10, {2}},
        {4.75e7, 1.05, {3}},
        // Clock-line activity on top of the steady clock tone.
        {1.00e7, 0.70, {4}},
        {1.00e7, 0.60, {5}},
        // Burst block A: stronger, visible through most of the grid.
        {3.25e7, 0.70, {6, 7, 8, 9, 10, 11}},
        {3.50e7, 0.70, {6, 7, 8, 9, 10, 11}},
        {3.75e7, 0.65, {6, 7, 8, 9, 10, 11}},
        // Burst block B: weaker, fades out by the mid grid.
        {0.50e7, 0.40, {6, 7, 8, 9, 10, 11}},
        {0.75e7, 0.40, {6, 7, 8, 9, 10, 11}},
        {1.25e7, 0.38, {6, 7, 8, 9, 10, 11}},
        {1.50e7, 0.38, {6, 7, 8, 9, 10, 11}},
    };
    const std::initializer_list<int> dwells = {2048, 2048, 2048, 2048, 2048, 2048,
                                               96,   96,   96,   96,   96,   96};
    cfg.modes.clear();
    for (int d : dwells) cfg.modes.push_back(Mode{{}, d});
    for (const auto& line : lines) {
        for (int m : line.modes)
            cfg.modes[static_cast<std::size_t>(m)].carriers.push_back({line.freq_hz, line.amp});
    }

    HtConfig ht;
    ht.key_bits = parse_key_hex("0f1e2d3c4b5a69788796a5b4c3d2e1f0");
    ht.plaintext_seed = 0x5EEDBA5EULL;
    ht.chip_rate_hz = 5e4;
    ht.carrier_hz = 2.3e7;
    ht.amp = 0.30;
    ht.n_load_ffs = 8;
    cfg.ht = ht;
    return cfg;
}

}  // namespace emscope::synth
