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
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vsbutton/calibration.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

CalibrationResult calibrate_threshold(const std::vector<SessionStats> &indoor, const std::vector<SessionStats> &outdoor) {
    if (indoor.empty() || outdoor.empty())
        throw ConfigError("calibration needs at least one indoor and one outdoor session");
    for (const SessionStats &s : indoor)
        if (s.label.kind != SessionKind::IndoorMotion)
            throw ConfigError("indoor calibration set contains a non-indoor session");
    for (const SessionStats &s : outdoor)
        if (s.label.kind != SessionKind::OutdoorMotion)
            throw ConfigError("outdoor calibration set contains a non-outdoor session");

    auto by_distance = [](const SessionStats &a, const SessionStats &b) { return a.max_distance < b.max_distance; };
    CalibrationResult r;
    r.weakest_indoor = *std::min_element(indoor.begin(), indoor.end(), by_distance);
    r.strongest_outdoor = *std::max_element(outdoor.begin(), outdoor.end(), by_distance);
    r.dmin_in = r.weakest_indoor.max_distance;
    r.dmax_out = r.strongest_outdoor.max_distance;
    r.margin = r.dmin_in - r.dmax_out;
    r.separable = r.dmin_in > r.dmax_out;
    if (r.separable) {
        r.threshold_t = (r.dmin_in + r.dmax_out) / 2.0;
        return r;
    }
    for (const SessionStats &s : indoor)
        if (s.max_distance <= r.dmax_out)
            r.offending_indoor.push_back(s);
    for (const SessionStats &s : outdoor)
        if (s.max_distance >= r.dmin_in)
            r.offending_outdoor.push_back(s);
    return r;
}

PcaBasis fit_warmup_basis(const CsiStream &stream, const PipelineConfig &pipeline, const DetectorConfig &detector) {
    return fit_pipeline_basis(stream, pipeline, pipeline.settle_samples, detector.warmup_samples);
}

std::vector<SessionStats> score_trace(const CsiStream &stream, const LabelSet &labels, const PipelineConfig &pipeline,
                                      const PcaBasis &basis, const DetectorConfig &detector) {
    const std::vector<FeatureSample> samples = process_stream(stream, pipeline, basis);
    const std::size_t head = pipeline.settle_samples + detector.warmup_samples;
    if (samples.size() <= head)
        throw DegenerateBaselineError(
            fmt::format("trace has {} frames; settle + warm-up alone needs {}", samples.size(), head));
    const std::span<const FeatureSample> all(samples);
    DetectorState state = warmup(all.subspan(pipeline.settle_samples, detector.warmup_samples), detector);
    return session_stats(all.subspan(head), labels, state, detector);
}

namespace {

std::string describe(const SessionStats &s) {
    return fmt::format("{} {} {}", to_string(s.label.kind), to_string(s.label.motion),
                       s.label.location_tag.empty() ? "-" : s.label.location_tag);
}

} // namespace

void write_calibration_report(const CalibrationResult &r, const std::vector<SessionStats> &indoor,
                              const std::vector<SessionStats> &outdoor, const std::vector<SessionStats> &no_motion,
                              std::ostream &out) {
    fmt::print(out, "# calibration report\n");
    fmt::print(out, "dmin_in = {:.6g}\n", r.dmin_in);
    fmt::print(out, "dmax_out = {:.6g}\n", r.dmax_out);
    if (r.separable) {
        fmt::print(out, "result = SEPARABLE\nthreshold_t = {:.9g}\nmargin = {:.6g}\n", r.threshold_t, r.margin);
    } else {
        fmt::print(out, "result = NON_SEPARABLE\nmargin = {:.6g}\n", r.margin);
    }
    fmt::print(out, "weakest_indoor = {} max={:.6g}\n", describe(r.weakest_indoor), r.weakest_indoor.max_distance);
    fmt::print(out, "strongest_outdoor = {} max={:.6g}\n", describe(r.strongest_outdoor),
               r.strongest_outdoor.max_distance);
    for (const SessionStats &s : r.offending_indoor)
        fmt::print(out, "offending = {} max={:.6g}\n", describe(s), s.max_distance);
    for (const SessionStats &s : r.offending_outdoor)
        fmt::print(out, "offending = {} max={:.6g}\n", describe(s), s.max_distance);
    auto side = [&](const SessionStats &s) -> const char * {
        if (!r.separable)
            return "";
        return s.max_distance > r.threshold_t ? " accept" : " reject";
    };
    for (const SessionStats &s : indoor)
        fmt::print(out, "session = {} max={:.6g}{}\n", describe(s), s.max_distance, side(s));
    for (const SessionStats &s : outdoor)
        fmt::print(out, "session = {} max={:.6g}{}\n", describe(s), s.max_distance, side(s));
    for (const SessionStats &s : no_motion)
        fmt::print(out, "session = {} max={:.6g}{}\n", describe(s), s.max_distance, side(s));
}

} // namespace vsbutton
