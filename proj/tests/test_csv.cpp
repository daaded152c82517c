/*
 * SPDX-FileCopyrightText: Copyright 2026 the emscope project
 * SPDX-License-Identifier: Apache-2.0
 */

#include "emscope/csv.hpp"

#include <cmath>

#include "doctest.h"
#include "emscope/error.hpp"
#include "emscope/prng.hpp"
#include "test_util.hpp"

using emscope::Error;
using emscope::Prng;
using emscope::Trace;
using namespace emscope::io;
using emscope::test::TempDir;
using emscope::test::write_file;

namespace {

CsvOptions two_column() { return CsvOptions{0, 1, std::nullopt}; }

bool kind_is(const Error& e, const char* kind) { return e.kind() == kind; }

}  // namespace

TEST_CASE("PicoScope-style header rows are skipped and the rate is inferred") {
    const std::string text = "Time,ChannelA\n(s),(V)\n0,0.1\n1e-6,0.2\n2e-6,0.3";
    const Trace t = parse_csv_trace(text, two_column());
    REQUIRE(t.samples.size() == 3);
    CHECK(t.samples[0] == 0.1);
    CHECK(t.samples[1] == 0.2);
    CHECK(t.samples[2] == 0.3);
    CHECK(t.sample_rate_hz == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("headerless single-column file with a rate override") {
    const Trace t = parse_csv_trace("0.5\n0.5\n0.5", CsvOptions{std::nullopt, 0, 1e6});
    REQUIRE(t.samples.size() == 3);
    for (double s : t.samples) CHECK(s == 0.5);
    CHECK(t.sample_rate_hz == 1e6);
}

TEST_CASE("non-uniform timebase is rejected") {
    const std::string text = "0,1\n1e-6,2\n3e-6,3";
    try {
        parse_csv_trace(text, two_column());
        FAIL("expected NonUniformTimebase");
    } catch (const Error& e) {
        CHECK(kind_is(e, "NonUniformTimebase"));
    }
}

TEST_CASE("error taxonomy: empty input, missing rate, interleaved garbage") {
    CHECK_THROWS_WITH_AS(parse_csv_trace("a,b\nc,d", two_column()),
                         doctest::Contains("NoNumericRows"), Error);
    CHECK_THROWS_WITH_AS(parse_csv_trace("1\n2\n3", CsvOptions{std::nullopt, 0, std::nullopt}),
                         doctest::Contains("MissingSampleRate"), Error);
    CHECK_THROWS_WITH_AS(parse_csv_trace("1\n2\noops\n3", CsvOptions{std::nullopt, 0, 1e6}),
                         doctest::Contains("NonNumericRow"), Error);
}

TEST_CASE("quoted cells and trailing blank lines are tolerated") {
    const Trace t = parse_csv_trace("\"Time\",\"A\"\n0,\"0.25\"\n1e-3,0.5\n\n", two_column());
    REQUIRE(t.samples.size() == 2);
    CHECK(t.samples[0] == 0.25);
    CHECK(t.samples[1] == 0.5);
    CHECK(t.sample_rate_hz == doctest::Approx(1e3).epsilon(1e-9));
}

TEST_CASE("parsing is deterministic") {
    const std::string text = "h\n0.125\n-3.5\n7.25";
    const CsvOptions opts{std::nullopt, 0, 2.0};
    const Trace a = parse_csv_trace(text, opts);
    const Trace b = parse_csv_trace(text, opts);
    CHECK(a.samples == b.samples);
    CHECK(a.sample_rate_hz == b.sample_rate_hz);
}

TEST_CASE("write then parse round-trips samples exactly") {
    Prng rng(99);
    Trace t;
    t.sample_rate_hz = 1.25e8;
    for (int i = 0; i < 500; ++i) t.samples.push_back(rng.gaussian() * 1e-3);

    TempDir dir("roundtrip");
    SUBCASE("two-column with time") {
        write_trace_csv(t, dir.path() / "t.csv", true);
        const Trace back = load_trace_csv(dir.path() / "t.csv", two_column());
        CHECK(back.samples == t.samples);
    }
    SUBCASE("value-only") {
        write_trace_csv(t, dir.path() / "t.csv", false);
        const Trace back =
            load_trace_csv(dir.path() / "t.csv", CsvOptions{std::nullopt, 0, t.sample_rate_hz});
        CHECK(back.samples == t.samples);
        CHECK(back.sample_rate_hz == t.sample_rate_hz);
    }
}

TEST_CASE("load_trace_dir orders by filename and truncates to the common length") {
    TempDir dir("load");
    // Created intentionally out of lexicographic order.
    write_file(dir.path() / "t002.csv", "3\n3\n3\n3\n");
    write_file(dir.path() / "t000.csv", "1\n1\n1\n1\n1\n1\n");
    write_file(dir.path() / "t001.csv", "2\n2\n2\n2\n");
    write_file(dir.path() / "notes.txt", "ignore me");
    const CsvOptions opts{std::nullopt, 0, 1e6};
    const LoadedTraceSet loaded = load_trace_dir(dir.path(), opts);
    REQUIRE(loaded.set.traces.size() == 3);
    CHECK(loaded.set.traces[0].samples[0] == 1.0);
    CHECK(loaded.set.traces[1].samples[0] == 2.0);
    CHECK(loaded.set.traces[2].samples[0] == 3.0);
    for (const auto& t : loaded.set.traces) CHECK(t.samples.size() == 4);
    CHECK(loaded.truncated_count == 1);
}

TEST_CASE("load_trace_dir error paths") {
    const CsvOptions opts{std::nullopt, 0, 1e6};
    SUBCASE("single file") {
        TempDir dir("one");
        write_file(dir.path() / "t0.csv", "1\n2\n");
        CHECK_THROWS_WITH_AS(load_trace_dir(dir.path(), opts), doctest::Contains("TooFewTraces"),
                             Error);
    }
    SUBCASE("unparseable files do not count") {
        TempDir dir("bad");
        write_file(dir.path() / "t0.csv", "1\n2\n");
        write_file(dir.path() / "t1.csv", "nope\nstill nope\n");
        CHECK_THROWS_WITH_AS(load_trace_dir(dir.path(), opts), doctest::Contains("TooFewTraces"),
                             Error);
    }
    SUBCASE("inconsistent sample rates") {
        TempDir dir("rates");
        write_file(dir.path() / "a.csv", "0,1\n1e-6,1\n2e-6,1\n");
        write_file(dir.path() / "b.csv", "0,1\n2e-6,1\n4e-6,1\n");
        CHECK_THROWS_WITH_AS(load_trace_dir(dir.path(), CsvOptions{0, 1, std::nullopt}),
                             doctest::Contains("InconsistentSampleRate"), Error);
    }
}

TEST_CASE("validate_traceset reports issues without mutating") {
    emscope::TraceSet set;
    set.traces.resize(3);
    for (auto& t : set.traces) {
        t.sample_rate_hz = 1e6;
        t.samples = {1.0, 2.0, 3.0, 4.0};
    }
    SUBCASE("clean set") {
        const auto report = validate_traceset(set);
        CHECK(report.n_traces == 3);
        CHECK(report.n_samples == 4);
        CHECK(report.sample_rate_hz == 1e6);
        CHECK(report.issues.empty());
    }
    SUBCASE("NaN sample is pinpointed") {
        set.traces[1].samples[2] = std::nan("");
        const auto report = validate_traceset(set);
        REQUIRE(report.issues.size() == 1);
        CHECK(report.issues[0].find("trace 1") != std::string::npos);
        CHECK(report.issues[0].find("index 2") != std::string::npos);
    }
    SUBCASE("constant trace is flagged") {
        set.traces[2].samples = {0.0, 0.0, 0.0, 0.0};
        const auto report = validate_traceset(set);
        REQUIRE(report.issues.size() == 1);
        CHECK(report.issues[0].find("trace 2") != std::string::npos);
        CHECK(report.issues[0].find("constant") != std::string::npos);
    }
}
