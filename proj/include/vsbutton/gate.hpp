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
#ifndef VSBUTTON_GATE_HPP
#define VSBUTTON_GATE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vsbutton/detector.hpp"

namespace vsbutton {

struct DaemonConfig {
    double probe_rate_hz = 50.0;
    std::size_t probe_payload_bytes = 84;
    double enable_duration_s = 60.0;
    std::string actuator_command; // empty: transitions are only logged
    std::string trace_out;        // empty: no recording
    double stall_timeout_s = 2.0;
    double detection_grace_s = 1.0;

    std::uint64_t enable_duration_us() const { return std::uint64_t(enable_duration_s * 1e6 + 0.5); }
    // Bits per second offered by the probe exchange, per direction.
    double offered_load_bps() const { return double(probe_payload_bytes) * 8.0 * probe_rate_hz; }
};

// Throws ConfigError.
void validate(const DaemonConfig &config);

// ---------------------------------------------------------------------------
// Event log

enum class EventKind { AnomalyStart, AnomalyEnd, MotionDetected, GateEnabled, GateDisabled, SourceStall };

struct LogRecord {
    std::uint64_t timestamp_us = 0;
    EventKind kind = EventKind::AnomalyStart;
    double peak = 0.0;         // MotionDetected
    std::uint64_t until_us = 0; // GateEnabled

    bool operator==(const LogRecord &) const = default;
};

// `<timestamp_us> <EVENT>` with `peak=` / `until=` suffixes where applicable.
std::string format_record(const LogRecord &record);

class EventLog {
  public:
    void add(const LogRecord &record);
    const std::vector<LogRecord> &records() const { return records_; }
    std::size_t count(EventKind kind) const;
    // Called for every record as it is added (e.g. to mirror to a file).
    void set_listener(std::function<void(const LogRecord &)> listener) { listener_ = std::move(listener); }
    void write(std::ostream &out) const;

  private:
    std::vector<LogRecord> records_;
    std::function<void(const LogRecord &)> listener_;
};

// ---------------------------------------------------------------------------
// Gate

enum class GateMode { Disabled, Enabled };
enum class CommandDecision { Accept, Reject };

struct GateState {
    GateMode mode = GateMode::Disabled;
    std::uint64_t enabled_until_us = 0;
    std::optional<MotionEvent> last_event;
    std::optional<std::uint64_t> last_now_us;

    bool operator==(const GateState &) const = default;
};

// An event enables (or extends) the gate until event time + enable duration.
// Without an event the gate closes once now reaches the expiry. The window is
// half-open: at now == enabled_until_us the gate is already closed.
// Throws ClockError if now moves backwards.
GateState gate_step(const GateState &state, std::uint64_t now_us, const std::optional<MotionEvent> &event,
                    const DaemonConfig &config, EventLog *log = nullptr);

CommandDecision check_command(const GateState &state, std::uint64_t now_us);

struct Span {
    std::uint64_t start_us = 0;
    std::uint64_t end_us = 0;

    bool operator==(const Span &) const = default;
};

// ENABLED spans reconstructed from GATE_ENABLED / GATE_DISABLED records; an
// open span ends at its last announced expiry.
std::vector<Span> enabled_spans(const std::vector<LogRecord> &records);

// Lock-free-readable copy of the gate for threads other than the ingestion path.
struct GateSnapshot {
    bool enabled = false;
    std::uint64_t enabled_until_us = 0;
};

// Lock-free: the snapshot is packed into one word (top bit = enabled), which
// leaves 63 bits of microseconds for the expiry.
class GatePublisher {
  public:
    void publish(const GateState &state) {
        std::uint64_t word = state.enabled_until_us & ~kEnabledBit;
        if (state.mode == GateMode::Enabled)
            word |= kEnabledBit;
        word_.store(word, std::memory_order_release);
    }
    GateSnapshot load() const {
        const std::uint64_t w = word_.load(std::memory_order_acquire);
        return {(w & kEnabledBit) != 0, w & ~kEnabledBit};
    }
    CommandDecision check(std::uint64_t now_us) const {
        const GateSnapshot s = load();
        return s.enabled && now_us < s.enabled_until_us ? CommandDecision::Accept : CommandDecision::Reject;
    }

  private:
    static constexpr std::uint64_t kEnabledBit = std::uint64_t{1} << 63;
    std::atomic<std::uint64_t> word_{0};
};

} // namespace vsbutton

#endif
