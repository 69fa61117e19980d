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
#ifndef VSBUTTON_ENGINE_HPP
#define VSBUTTON_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "vsbutton/config.hpp"
#include "vsbutton/detector.hpp"
#include "vsbutton/gate.hpp"
#include "vsbutton/pipeline.hpp"

namespace vsbutton {

// Owns the ingestion path: streaming pipeline, detector and gate, fed one CSI
// frame at a time in timestamp order. Frames are processed on the caller's
// thread; the gate is mirrored into a GatePublisher for other readers.
//
// Lifecycle per (re)start: the first settle_samples features are dropped, the
// next warmup_samples seed the detector, then every feature is stepped. With
// no basis supplied, the engine buffers that head, fits the basis on it and
// replays the buffer through the pipeline.
class DetectionEngine {
  public:
    DetectionEngine(Profile profile, std::optional<PcaBasis> basis, EventLog &log);

    void ingest(const CsiFrame &frame);
    // Drains the pipeline's look-ahead at end of input.
    void finish();
    // Source went quiet: log SOURCE_STALL at `at_us` and restart settle/warm-up.
    void suspend(std::uint64_t at_us);
    // Advances the gate clock without a sample (expiry during a stall).
    void advance_clock(std::uint64_t now_us);

    const GateState &gate() const { return gate_; }
    const GatePublisher &publisher() const { return publisher_; }
    const std::vector<MotionEvent> &events() const { return events_; }
    const std::optional<PcaBasis> &basis() const { return basis_; }
    bool detecting() const { return phase_ == Phase::Detecting; }
    std::uint64_t frames_ingested() const { return frames_; }
    std::uint64_t samples_stepped() const { return stepped_; }
    // Incremented on every gate mode change; lets callers spot transitions.
    std::uint64_t gate_transitions() const { return transitions_; }

  private:
    enum class Phase { Buffering, Settling, WarmingUp, Detecting };

    void restart();
    void start_pipeline();
    void on_feature(FeatureSample &&sample);
    void tick_gate(std::uint64_t now_us, const std::optional<MotionEvent> &event);

    Profile profile_;
    std::optional<PcaBasis> basis_;
    EventLog &log_;
    std::optional<StreamingPipeline> pipeline_;
    DetectorState detector_;
    GateState gate_;
    GatePublisher publisher_;
    Phase phase_ = Phase::Buffering;
    std::vector<CsiFrame> buffer_;
    std::vector<FeatureSample> warmup_;
    std::vector<FeatureSample> scratch_;
    std::vector<MotionEvent> events_;
    std::size_t settled_ = 0;
    std::optional<std::uint64_t> last_frame_us_;
    std::uint64_t frames_ = 0;
    std::uint64_t stepped_ = 0;
    std::uint64_t transitions_ = 0;
};

} // namespace vsbutton

#endif
