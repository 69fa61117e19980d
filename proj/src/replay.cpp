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
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/replay.hpp"

namespace vsbutton {

std::size_t ReplayResult::false_alarms() const {
    std::size_t n = unlabeled_false_alarms;
    for (const LabelSummary &s : labels)
        n += s.false_alarms;
    return n;
}

double ReplayResult::enabled_total_s() const {
    double total = 0.0;
    for (const Span &s : enabled_spans)
        total += double(s.end_us - s.start_us) / 1e6;
    return total;
}

std::vector<LabelSummary> summarize_events(const std::vector<MotionEvent> &events, const LabelSet &labels,
                                           std::uint64_t grace_us, std::size_t *unlabeled_false_alarms) {
    std::map<std::pair<int, int>, LabelSummary> by_class;
    auto slot = [&](const SessionLabel &l) -> LabelSummary & {
        LabelSummary &s = by_class[{int(l.kind), int(l.motion)}];
        s.kind = l.kind;
        s.motion = l.motion;
        return s;
    };
    for (const LabelRange &r : labels)
        ++slot(r.label).ranges;

    std::vector<bool> detected(labels.size(), false);
    std::size_t unlabeled = 0;
    for (const MotionEvent &e : events) {
        const std::uint64_t t = e.timestamp_us;
        std::ptrdiff_t hit = -1;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const LabelRange &r = labels[i];
            if (r.label.kind == SessionKind::IndoorMotion && t >= r.start_us && t < r.end_us + grace_us) {
                hit = std::ptrdiff_t(i);
                if (r.contains(t))
                    break;
            }
        }
        if (hit >= 0) {
            detected[std::size_t(hit)] = true;
            continue;
        }
        const std::ptrdiff_t at = find_label(labels, t);
        if (at >= 0)
            ++slot(labels[std::size_t(at)].label).false_alarms;
        else
            ++unlabeled;
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (detected[i])
            ++slot(labels[i].label).detected;
    if (unlabeled_false_alarms)
        *unlabeled_false_alarms = unlabeled;

    std::vector<LabelSummary> out;
    for (auto &[key, s] : by_class)
        out.push_back(s);
    return out;
}

ReplayResult run_replay(const CsiStream &trace, const LabelSet &labels, const Profile &profile,
                        const std::optional<PcaBasis> &basis) {
    if (!profile.threshold_t)
        throw ConfigError("replay needs a calibrated threshold_t; run `calibrate` first");
    ReplayResult result;
    DetectionEngine engine(profile, basis, result.log);
    for (const CsiFrame &f : trace.frames)
        engine.ingest(f);
    engine.finish();

    result.events = engine.events();
    result.enabled_spans = enabled_spans(result.log.records());
    result.frames = engine.frames_ingested();
    result.samples_stepped = engine.samples_stepped();
    result.basis = engine.basis();
    const auto grace = std::uint64_t(profile.daemon.detection_grace_s * 1e6);
    result.labels = summarize_events(result.events, labels, grace, &result.unlabeled_false_alarms);
    return result;
}

void write_summary(const ReplayResult &r, std::ostream &out) {
    fmt::print(out, "# replay summary\n");
    fmt::print(out, "frames = {}\nsamples_scored = {}\nmotion_events = {}\n", r.frames, r.samples_stepped,
               r.events.size());
    fmt::print(out, "enabled_spans = {}\nenabled_total_s = {:.3f}\n", r.enabled_spans.size(), r.enabled_total_s());
    fmt::print(out, "false_alarms = {}\n", r.false_alarms());
    for (const LabelSummary &s : r.labels)
        fmt::print(out, "label = {}/{} ranges={} detections={} false_alarms={}\n", to_string(s.kind),
                   to_string(s.motion), s.ranges, s.detected, s.false_alarms);
    if (r.unlabeled_false_alarms)
        fmt::print(out, "label = UNLABELED false_alarms={}\n", r.unlabeled_false_alarms);
}

} // namespace vsbutton
