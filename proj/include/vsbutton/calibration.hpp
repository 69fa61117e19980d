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
#ifndef VSBUTTON_CALIBRATION_HPP
#define VSBUTTON_CALIBRATION_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "vsbutton/detector.hpp"
#include "vsbutton/pipeline.hpp"

namespace vsbutton {

struct CalibrationResult {
    bool separable = false;
    double dmin_in = 0.0;
    double dmax_out = 0.0;
    double threshold_t = 0.0; // meaningful iff separable
    double margin = 0.0;      // dmin_in - dmax_out
    SessionStats weakest_indoor;
    SessionStats strongest_outdoor;
    // Sessions on the wrong side of the other class's extreme; empty when separable.
    std::vector<SessionStats> offending_indoor;
    std::vector<SessionStats> offending_outdoor;
};

// t = (Dmin_in + Dmax_out) / 2 when the weakest indoor motion still beats the
// strongest outdoor one; otherwise a non-separable report.
// Throws ConfigError on empty input or mislabelled sessions.
CalibrationResult calibrate_threshold(const std::vector<SessionStats> &indoor, const std::vector<SessionStats> &outdoor);

// Runs one labelled trace end to end: pipeline, settle, warm-up on the first
// warmup_samples features, then session_stats over the rest.
std::vector<SessionStats> score_trace(const CsiStream &stream, const LabelSet &labels, const PipelineConfig &pipeline,
                                      const PcaBasis &basis, const DetectorConfig &detector);

// Basis fitted on the motion-free warm-up window of a trace.
PcaBasis fit_warmup_basis(const CsiStream &stream, const PipelineConfig &pipeline, const DetectorConfig &detector);

// Structured text: Dmin_in, Dmax_out, t or NON_SEPARABLE, then one line per session.
void write_calibration_report(const CalibrationResult &result, const std::vector<SessionStats> &indoor,
                              const std::vector<SessionStats> &outdoor, const std::vector<SessionStats> &no_motion,
                              std::ostream &out);

} // namespace vsbutton

#endif
