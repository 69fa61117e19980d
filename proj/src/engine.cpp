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
#include <fmt/format.h>

#include "vsbutton/engine.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

DetectionEngine::DetectionEngine(Profile profile, std::optional<PcaBasis> basis, EventLog &log)
    : profile_(std::move(profile)), basis_(std::move(basis)), log_(log) {
    validate(profile_);
    if (basis_)
        check_keep(*basis_, profile_.pipeline.pca_keep);
    restart();
    publisher_.publish(gate_);
}

void DetectionEngine::restart() {
    warmup_.clear();
    settled_ = 0;
    if (basis_) {
        start_pipeline();
    } else {
        pipeline_.reset();
        buffer_.clear();
        phase_ = Phase::Buffering;
    }
}

void DetectionEngine::start_pipeline() {
    if (!pipeline_)
        pipeline_.emplace(profile_.pipeline, *basis_);
    else
        pipeline_->reset();
    phase_ = profile_.pipeline.settle_samples > 0 ? Phase::Settling : Phase::WarmingUp;
}

void DetectionEngine::ingest(const CsiFrame &frame) {
    if (last_frame_us_ && frame.timestamp_us <= *last_frame_us_)
        throw ClockError(fmt::format("frame timestamp {} does not advance past {}", frame.timestamp_us, *last_frame_us_));
    const auto stall_us = std::uint64_t(profile_.daemon.stall_timeout_s * 1e6);
    if (last_frame_us_ && frame.timestamp_us - *last_frame_us_ > stall_us)
        suspend(*last_frame_us_ + stall_us);
    last_frame_us_ = frame.timestamp_us;
    ++frames_;

    if (phase_ == Phase::Buffering) {
        buffer_.push_back(frame);
        const std::size_t need = profile_.pipeline.settle_samples + profile_.detector.warmup_samples +
                                 profile_.pipeline.median_window / 2;
        if (buffer_.size() < need)
            return;
        CsiStream head;
        head.sample_rate_hz = profile_.pipeline.sample_rate_hz;
        head.geometry = {frame.n_tx, frame.n_rx, frame.n_sub};
        head.frames = std::move(buffer_);
        buffer_.clear();
        basis_ = fit_pipeline_basis(head, profile_.pipeline, profile_.pipeline.settle_samples,
                                    profile_.detector.warmup_samples);
        start_pipeline();
        for (const CsiFrame &f : head.frames) {
            scratch_.clear();
            pipeline_->push(f, scratch_);
            for (FeatureSample &s : scratch_)
                on_feature(std::move(s));
        }
        return;
    }

    scratch_.clear();
    pipeline_->push(frame, scratch_);
    for (FeatureSample &s : scratch_)
        on_feature(std::move(s));
}

void DetectionEngine::finish() {
    if (!pipeline_ || phase_ == Phase::Buffering)
        return;
    scratch_.clear();
    pipeline_->flush(scratch_);
    for (FeatureSample &s : scratch_)
        on_feature(std::move(s));
}

void DetectionEngine::suspend(std::uint64_t at_us) {
    log_.add({at_us, EventKind::SourceStall});
    if (detector_.streak > 0)
        log_.add({at_us, EventKind::AnomalyEnd});
    detector_ = DetectorState{};
    restart();
}

void DetectionEngine::advance_clock(std::uint64_t now_us) {
    if (gate_.last_now_us && now_us < *gate_.last_now_us)
        return;
    tick_gate(now_us, std::nullopt);
}

void DetectionEngine::tick_gate(std::uint64_t now_us, const std::optional<MotionEvent> &event) {
    const GateMode before = gate_.mode;
    gate_ = gate_step(gate_, now_us, event, profile_.daemon, &log_);
    if (gate_.mode != before)
        ++transitions_;
    publisher_.publish(gate_);
}

void DetectionEngine::on_feature(FeatureSample &&sample) {
    switch (phase_) {
    case Phase::Buffering:
        break;
    case Phase::Settling:
        if (++settled_ >= profile_.pipeline.settle_samples)
            phase_ = Phase::WarmingUp;
        tick_gate(sample.timestamp_us, std::nullopt);
        return;
    case Phase::WarmingUp:
        warmup_.push_back(std::move(sample));
        tick_gate(warmup_.back().timestamp_us, std::nullopt);
        if (warmup_.size() == profile_.detector.warmup_samples) {
            detector_ = warmup(warmup_, profile_.detector);
            warmup_.clear();
            phase_ = Phase::Detecting;
        }
        return;
    case Phase::Detecting:
        break;
    }

    const std::size_t streak_before = detector_.streak;
    const StepResult res = step(detector_, sample, profile_.detector);
    ++stepped_;
    if (res.verdict == Verdict::Anomaly && streak_before == 0)
        log_.add({sample.timestamp_us, EventKind::AnomalyStart});
    else if (res.verdict == Verdict::Normal && streak_before > 0)
        log_.add({sample.timestamp_us, EventKind::AnomalyEnd});
    if (res.event) {
        events_.push_back(*res.event);
        log_.add({res.event->timestamp_us, EventKind::MotionDetected, res.event->peak_distance});
    }
    tick_gate(sample.timestamp_us, res.event);
}

} // namespace vsbutton
