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
#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/gate.hpp"

namespace vsbutton {

void validate(const DaemonConfig &c) {
    if (!(c.probe_rate_hz > 0.0))
        throw ConfigError("probe_rate_hz must be positive");
    if (!(c.enable_duration_s > 0.0))
        throw ConfigError("enable_duration_s must be positive");
    if (!(c.stall_timeout_s > 0.0))
        throw ConfigError("stall_timeout_s must be positive");
    if (!(c.detection_grace_s >= 0.0))
        throw ConfigError("detection_grace_s must be >= 0");
}

std::string format_record(const LogRecord &r) {
    switch (r.kind) {
    case EventKind::AnomalyStart:
        return fmt::format("{} ANOMALY_START", r.timestamp_us);
    case EventKind::AnomalyEnd:
        return fmt::format("{} ANOMALY_END", r.timestamp_us);
    case EventKind::MotionDetected:
        return fmt::format("{} MOTION_DETECTED peak={:.6g}", r.timestamp_us, r.peak);
    case EventKind::GateEnabled:
        return fmt::format("{} GATE_ENABLED until={}", r.timestamp_us, r.until_us);
    case EventKind::GateDisabled:
        return fmt::format("{} GATE_DISABLED", r.timestamp_us);
    case EventKind::SourceStall:
        return fmt::format("{} SOURCE_STALL", r.timestamp_us);
    }
    return {};
}

void EventLog::add(const LogRecord &record) {
    records_.push_back(record);
    if (listener_)
        listener_(record);
}

std::size_t EventLog::count(EventKind kind) const {
    return std::size_t(std::count_if(records_.begin(), records_.end(), [&](const LogRecord &r) { return r.kind == kind; }));
}

void EventLog::write(std::ostream &out) const {
    for (const LogRecord &r : records_)
        out << format_record(r) << '\n';
}

GateState gate_step(const GateState &state, std::uint64_t now_us, const std::optional<MotionEvent> &event,
                    const DaemonConfig &config, EventLog *log) {
    if (state.last_now_us && now_us < *state.last_now_us)
        throw ClockError(fmt::format("gate clock went backwards: {} after {}", now_us, *state.last_now_us));

    GateState next = state;
    next.last_now_us = now_us;
    auto emit = [&](const LogRecord &r) {
        if (log)
            log->add(r);
    };

    if (event) {
        // A previous window that lapsed before this event closes first.
        if (next.mode == GateMode::Enabled && event->timestamp_us >= next.enabled_until_us) {
            emit({next.enabled_until_us, EventKind::GateDisabled});
            next.mode = GateMode::Disabled;
        }
        const std::uint64_t until = event->timestamp_us + config.enable_duration_us();
        next.enabled_until_us = next.mode == GateMode::Enabled ? std::max(next.enabled_until_us, until) : until;
        next.mode = GateMode::Enabled;
        next.last_event = event;
        emit({event->timestamp_us, EventKind::GateEnabled, 0.0, next.enabled_until_us});
        return next;
    }
    if (next.mode == GateMode::Enabled && now_us >= next.enabled_until_us) {
        next.mode = GateMode::Disabled;
        emit({next.enabled_until_us, EventKind::GateDisabled});
    }
    return next;
}

CommandDecision check_command(const GateState &state, std::uint64_t now_us) {
    return state.mode == GateMode::Enabled && now_us < state.enabled_until_us ? CommandDecision::Accept
                                                                              : CommandDecision::Reject;
}

std::vector<Span> enabled_spans(const std::vector<LogRecord> &records) {
    std::vector<Span> spans;
    std::optional<Span> open;
    for (const LogRecord &r : records) {
        if (r.kind == EventKind::GateEnabled) {
            if (!open)
                open = Span{r.timestamp_us, r.until_us};
            else
                open->end_us = std::max(open->end_us, r.until_us);
        } else if (r.kind == EventKind::GateDisabled && open) {
            open->end_us = r.timestamp_us;
            spans.push_back(*open);
            open.reset();
        }
    }
    if (open)
        spans.push_back(*open);
    return spans;
}

} // namespace vsbutton
