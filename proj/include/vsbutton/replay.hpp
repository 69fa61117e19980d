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
#ifndef VSBUTTON_REPLAY_HPP
#define VSBUTTON_REPLAY_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vsbutton/config.hpp"
#include "vsbutton/engine.hpp"

namespace vsbutton {

// Counts for one (kind, motion) label class.
struct LabelSummary {
    SessionKind kind = SessionKind::NoMotion;
    Motion motion = Motion::None;
    std::size_t ranges = 0;       // labelled ranges (motion bursts for motion labels)
    std::size_t detected = 0;     // indoor ranges with at least one MotionEvent
    std::size_t false_alarms = 0; // MotionEvents not explained by an indoor range
};

struct ReplayResult {
    EventLog log;
    std::vector<MotionEvent> events;
    std::vector<Span> enabled_spans;
    std::vector<LabelSummary> labels;
    std::size_t unlabeled_false_alarms = 0;
    std::uint64_t frames = 0;
    std::uint64_t samples_stepped = 0;
    std::optional<PcaBasis> basis;

    std::size_t false_alarms() const;
    double enabled_total_s() const;
};

// Offline run over a recorded trace on its own timestamps. Requires a
// calibrated threshold (ConfigError otherwise). Without a basis the engine
// fits one on the trace's warm-up window.
ReplayResult run_replay(const CsiStream &trace, const LabelSet &labels, const Profile &profile,
                        const std::optional<PcaBasis> &basis);

// Event attribution used by the summary: an event detects indoor range r when
// r.start <= t < r.end + grace.
std::vector<LabelSummary> summarize_events(const std::vector<MotionEvent> &events, const LabelSet &labels,
                                           std::uint64_t grace_us, std::size_t *unlabeled_false_alarms = nullptr);

void write_summary(const ReplayResult &result, std::ostream &out);

} // namespace vsbutton

#endif
