// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "vsbutton/config.hpp"
#include "vsbutton/errors.hpp"
#include "vsbutton/gate.hpp"

using namespace vsbutton;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSec = 1000000;

MotionEvent at(std::uint64_t t) { return {t, 10.0}; }

} // namespace

TEST(Gate, EventEnablesForSixtySeconds) {
    EventLog log;
    const GateState s = gate_step({}, 5 * kSec, at(5 * kSec), DaemonConfig{}, &log);
    EXPECT_EQ(s.mode, GateMode::Enabled);
    EXPECT_EQ(s.enabled_until_us, 65 * kSec);
    ASSERT_EQ(log.records().size(), 1u);
    EXPECT_EQ(format_record(log.records()[0]), "5000000 GATE_ENABLED until=65000000");
}

TEST(Gate, ExpiryBoundaryIsClosed) {
    const DaemonConfig c;
    GateState s = gate_step({}, 0, at(0), c);
    s = gate_step(s, 60 * kSec - 1, std::nullopt, c);
    EXPECT_EQ(s.mode, GateMode::Enabled);
    EventLog log;
    s = gate_step(s, 60 * kSec, std::nullopt, c, &log);
    EXPECT_EQ(s.mode, GateMode::Disabled);
    ASSERT_EQ(log.records().size(), 1u);
    EXPECT_EQ(format_record(log.records()[0]), "60000000 GATE_DISABLED");
}

TEST(Gate, RetriggerExtendsIntoOneSpan) {
    const DaemonConfig c;
    EventLog log;
    GateState s = gate_step({}, 0, at(0), c, &log);
    s = gate_step(s, 30 * kSec, at(30 * kSec), c, &log);
    EXPECT_EQ(s.enabled_until_us, 90 * kSec);
    for (std::uint64_t t = 31; t <= 100; ++t)
        s = gate_step(s, t * kSec, std::nullopt, c, &log);
    const auto spans = enabled_spans(log.records());
    ASSERT_EQ(spans.size(), 1u);
    EXPECT_EQ(spans[0].end_us - spans[0].start_us, 90 * kSec);
}

TEST(Gate, LateEventClosesLapsedWindowFirst) {
    const DaemonConfig c;
    EventLog log;
    GateState s = gate_step({}, 0, at(0), c, &log);
    s = gate_step(s, 70 * kSec, at(70 * kSec), c, &log);
    ASSERT_EQ(log.records().size(), 3u);
    EXPECT_EQ(log.records()[1].kind, EventKind::GateDisabled);
    EXPECT_EQ(log.records()[1].timestamp_us, 60 * kSec);
    EXPECT_EQ(enabled_spans(log.records()).size(), 2u);
}

TEST(Gate, ClockRegressionThrows) {
    const GateState s = gate_step({}, 10, std::nullopt, DaemonConfig{});
    EXPECT_NO_THROW(gate_step(s, 10, std::nullopt, DaemonConfig{}));
    EXPECT_THROW(gate_step(s, 9, std::nullopt, DaemonConfig{}), ClockError);
}

TEST(Gate, CommandDecisions) {
    const DaemonConfig c;
    EXPECT_EQ(check_command(GateState{}, 0), CommandDecision::Reject);
    EXPECT_EQ(check_command(GateState{}, 1000 * kSec), CommandDecision::Reject);
    const GateState s = gate_step({}, 10 * kSec, at(10 * kSec), c);
    EXPECT_EQ(check_command(s, 11 * kSec), CommandDecision::Accept);
    EXPECT_EQ(check_command(s, 71 * kSec), CommandDecision::Reject);
    EXPECT_EQ(check_command(s, 70 * kSec), CommandDecision::Reject);
}

TEST(Gate, EnabledTimeIsUnionOfWindows) {
    std::mt19937_64 rng(11);
    DaemonConfig c;
    c.enable_duration_s = 5.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> events;
        std::uint64_t t = 0;
        for (int i = 0; i < 12; ++i) {
            t += 1 + rng() % (9 * kSec);
            events.push_back(t);
        }
        EventLog log;
        GateState s;
        std::size_t next = 0;
        const std::uint64_t end = events.back() + 20 * kSec;
        for (std::uint64_t now = 0; now <= end; now += 20000) {
            std::optional<MotionEvent> ev;
            if (next < events.size() && events[next] <= now)
                ev = at(events[next++]);
            s = gate_step(s, now, ev, c, &log);
            EXPECT_EQ(check_command(s, now) == CommandDecision::Accept, s.mode == GateMode::Enabled &&
                                                                              now < s.enabled_until_us);
        }
        std::uint64_t union_us = 0, covered_to = 0;
        for (std::uint64_t e : events) {
            const std::uint64_t lo = std::max(e, covered_to), hi = e + c.enable_duration_us();
            if (hi > lo)
                union_us += hi - lo;
            covered_to = std::max(covered_to, hi);
        }
        std::uint64_t enabled_us = 0;
        for (const Span &sp : enabled_spans(log.records()))
            enabled_us += sp.end_us - sp.start_us;
        EXPECT_EQ(enabled_us, union_us);
    }
}

TEST(Gate, ReplayingEventsIsDeterministic) {
    const DaemonConfig c;
    auto run = [&] {
        EventLog log;
        GateState s;
        for (std::uint64_t t = 0; t < 400; ++t)
            s = gate_step(s, t * kSec, t % 97 == 3 ? std::optional(at(t * kSec)) : std::nullopt, c, &log);
        return log.records();
    };
    EXPECT_EQ(run(), run());
}

TEST(Gate, PublisherMirrorsState) {
    GatePublisher pub;
    EXPECT_EQ(pub.check(0), CommandDecision::Reject);
    const GateState s = gate_step({}, 0, at(0), DaemonConfig{});
    pub.publish(s);
    EXPECT_TRUE(pub.load().enabled);
    EXPECT_EQ(pub.load().enabled_until_us, 60 * kSec);
    EXPECT_EQ(pub.check(59 * kSec), CommandDecision::Accept);
    EXPECT_EQ(pub.check(60 * kSec), CommandDecision::Reject);
}

TEST(Gate, LogFormats) {
    EXPECT_EQ(format_record({7, EventKind::AnomalyStart}), "7 ANOMALY_START");
    EXPECT_EQ(format_record({8, EventKind::AnomalyEnd}), "8 ANOMALY_END");
    EXPECT_EQ(format_record({9, EventKind::MotionDetected, 12.5}), "9 MOTION_DETECTED peak=12.5");
    EXPECT_EQ(format_record({10, EventKind::SourceStall}), "10 SOURCE_STALL");
    EventLog log;
    int heard = 0;
    log.set_listener([&](const LogRecord &) { ++heard; });
    log.add({1, EventKind::AnomalyStart});
    log.add({2, EventKind::AnomalyEnd});
    EXPECT_EQ(heard, 2);
    EXPECT_EQ(log.count(EventKind::AnomalyEnd), 1u);
    std::stringstream out;
    log.write(out);
    EXPECT_EQ(out.str(), "1 ANOMALY_START\n2 ANOMALY_END\n");
}

TEST(DaemonConfig, ValidationAndLoad) {
    DaemonConfig c;
    EXPECT_NO_THROW(validate(c));
    EXPECT_DOUBLE_EQ(c.offered_load_bps(), 33600.0);
    c.probe_rate_hz = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.enable_duration_s = -1.0;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Profile, ParsesEveryKey) {
    std::stringstream in(R"(# site profile
median_window = 7
ema_window = 11
butterworth_order = 2
butterworth_cutoff_hz = 8.5
sample_rate_hz = 40
pca_keep = 2, 3
pipeline_order = pca-first
settle_samples = 20
pca_basis = room.basis
alpha = 0.95
cov_alpha = 0.99
threshold_t = 42.5
probe_threshold = 6
consecutive_count = 8
warmup_samples = 300
probe_rate_hz = 40
probe_payload_bytes = 64
enable_duration_s = 30
actuator_command = echo {transition}
trace_out = /tmp/out.csit
stall_timeout_s = 3
detection_grace_s = 0.5
)");
    const Profile p = parse_profile(in, "/etc/vsbutton");
    EXPECT_EQ(p.pipeline.median_window, 7u);
    EXPECT_EQ(p.pipeline.ema_window, 11u);
    EXPECT_EQ(p.pipeline.butterworth_order, 2);
    EXPECT_DOUBLE_EQ(p.pipeline.butterworth_cutoff_hz, 8.5);
    EXPECT_DOUBLE_EQ(p.pipeline.sample_rate_hz, 40.0);
    EXPECT_EQ(p.pipeline.pca_keep, (std::vector<int>{2, 3}));
    EXPECT_EQ(p.pipeline.order, PipelineOrder::PcaFirst);
    EXPECT_EQ(p.pipeline.settle_samples, 20u);
    EXPECT_EQ(fs::path(p.pca_basis), fs::path("/etc/vsbutton/room.basis"));
    EXPECT_DOUBLE_EQ(p.detector.alpha, 0.95);
    EXPECT_DOUBLE_EQ(p.detector.cov_alpha, 0.99);
    ASSERT_TRUE(p.threshold_t.has_value());
    EXPECT_DOUBLE_EQ(*p.threshold_t, 42.5);
    EXPECT_DOUBLE_EQ(p.detector.threshold_t, 42.5);
    EXPECT_DOUBLE_EQ(p.probe_threshold, 6.0);
    EXPECT_EQ(p.detector.consecutive_count, 8u);
    EXPECT_EQ(p.detector.warmup_samples, 300u);
    EXPECT_DOUBLE_EQ(p.daemon.probe_rate_hz, 40.0);
    EXPECT_EQ(p.daemon.probe_payload_bytes, 64u);
    EXPECT_DOUBLE_EQ(p.daemon.enable_duration_s, 30.0);
    EXPECT_EQ(p.daemon.actuator_command, "echo {transition}");
    EXPECT_EQ(p.daemon.trace_out, "/tmp/out.csit");
    EXPECT_DOUBLE_EQ(p.daemon.stall_timeout_s, 3.0);
    EXPECT_DOUBLE_EQ(p.daemon.detection_grace_s, 0.5);
}

TEST(Profile, DefaultsAndUncalibrated) {
    std::stringstream in("");
    const Profile p = parse_profile(in);
    EXPECT_FALSE(p.threshold_t.has_value());
    EXPECT_DOUBLE_EQ(p.detector.threshold_t, p.probe_threshold);
    EXPECT_EQ(p.pipeline.median_window, 9u);
    EXPECT_EQ(p.detector.warmup_samples, 250u);
}

TEST(Profile, Errors) {
    std::stringstream unknown("median_windw = 9\n");
    EXPECT_THROW(parse_profile(unknown), ConfigError);
    std::stringstream nan("alpha = fast\n");
    EXPECT_THROW(parse_profile(nan), ConfigError);
    std::stringstream noeq("alpha 0.9\n");
    EXPECT_THROW(parse_profile(noeq), ConfigError);
    std::stringstream even("median_window = 4\n");
    EXPECT_THROW(validate(parse_profile(even)), ConfigError);
    std::stringstream order("pipeline_order = sideways\n");
    EXPECT_THROW(parse_profile(order), ConfigError);
}

TEST(Profile, WriteParseRoundTripAndKeyRewrite) {
    const fs::path dir = fs::temp_directory_path() / "vsbutton_profile_test";
    fs::create_directories(dir);
    const fs::path path = dir / "site.conf";
    {
        std::ofstream out(path);
        write_profile(Profile{}, out);
    }
    set_config_key(path.string(), "threshold_t", "12.5");
    set_config_key(path.string(), "alpha", "0.9");
    const Profile p = load_profile(path.string());
    ASSERT_TRUE(p.threshold_t.has_value());
    EXPECT_DOUBLE_EQ(*p.threshold_t, 12.5);
    EXPECT_DOUBLE_EQ(p.detector.alpha, 0.9);
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_NE(text.find("# detector"), std::string::npos);
    EXPECT_EQ(text.find("alpha = 0.98"), std::string::npos);
    fs::remove_all(dir);
    EXPECT_THROW(load_profile((dir / "missing.conf").string()), Error);
}
