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
#include <chrono>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/live.hpp"

namespace vsbutton {

ReplayLoopSource::ReplayLoopSource(CsiStream trace) : trace_(std::move(trace)) {
    if (trace_.frames.empty())
        throw EmptyInputError("replay-loop source needs a non-empty trace");
    const auto step = std::uint64_t(1e6 / trace_.sample_rate_hz + 0.5);
    period_us_ = trace_.frames.back().timestamp_us - trace_.frames.front().timestamp_us + step;
}

std::optional<CsiFrame> ReplayLoopSource::poll() {
    CsiFrame f = trace_.frames[next_];
    f.timestamp_us = f.timestamp_us - trace_.frames.front().timestamp_us + offset_us_;
    if (++next_ == trace_.frames.size()) {
        next_ = 0;
        offset_us_ += period_us_;
    }
    return f;
}

SyntheticLiveSource::SyntheticLiveSource(ChannelModel model, std::vector<Segment> schedule, double sample_rate_hz)
    : synth_(std::move(model), std::move(schedule), sample_rate_hz, true) {}

SteadyClock::SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

std::uint64_t SteadyClock::now_us() {
    return std::uint64_t(
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - origin_).count());
}

void SteadyClock::sleep_until(std::uint64_t t_us) { std::this_thread::sleep_until(origin_ + std::chrono::microseconds(t_us)); }

ProbePacer::ProbePacer(double rate_hz, std::size_t payload_bytes) : rate_(rate_hz), payload_(payload_bytes) {
    if (!(rate_hz > 0.0))
        throw ConfigError("probe rate must be positive");
}

std::uint64_t ProbePacer::wait_next(Clock &clock) {
    if (!start_us_)
        start_us_ = clock.now_us();
    // Due times are computed from the start so rounding never accumulates.
    const std::uint64_t due = *start_us_ + std::uint64_t(double(sent_) * 1e6 / rate_ + 0.5);
    clock.sleep_until(due);
    ++sent_;
    return due;
}

CommandActuator::CommandActuator(std::string command_template) : template_(std::move(command_template)) {
    thread_ = std::thread([this] { worker(); });
}

CommandActuator::~CommandActuator() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    thread_.join();
}

std::string CommandActuator::render(const std::string &command_template, const std::string &transition) {
    static const std::string placeholder = "{transition}";
    std::string out = command_template;
    bool found = false;
    for (auto pos = out.find(placeholder); pos != std::string::npos; pos = out.find(placeholder, pos)) {
        out.replace(pos, placeholder.size(), transition);
        pos += transition.size();
        found = true;
    }
    if (!found)
        out += " " + transition;
    return out;
}

void CommandActuator::dispatch(const std::string &transition) {
    {
        std::lock_guard lock(mu_);
        queue_.push_back(render(template_, transition));
    }
    cv_.notify_one();
}

void CommandActuator::drain() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return queue_.empty() && !busy_; });
}

void CommandActuator::worker() {
    std::unique_lock lock(mu_);
    for (;;) {
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty() && stopping_)
            return;
        const std::string cmd = std::move(queue_.front());
        queue_.pop_front();
        busy_ = true;
        lock.unlock();
        const int rc = std::system(cmd.c_str());
        if (rc != 0)
            fmt::print(stderr, "actuator command exited with status {}: {}\n", rc, cmd);
        lock.lock();
        busy_ = false;
        if (queue_.empty())
            idle_cv_.notify_all();
    }
}

LiveSummary run_live(const Profile &profile, const std::optional<PcaBasis> &basis, CsiSource &source, Clock &clock,
                     Actuator *actuator, EventLog &log, const LiveOptions &options) {
    if (!profile.threshold_t)
        throw ConfigError("live mode needs a calibrated threshold_t; run `calibrate` first");

    DetectionEngine engine(profile, basis, log);
    ProbePacer pacer(profile.daemon.probe_rate_hz, profile.daemon.probe_payload_bytes);
    LiveSummary summary;
    summary.offered_load_bps = pacer.offered_load_bps();

    const bool recording = !profile.daemon.trace_out.empty();
    CsiStream recorded;
    recorded.sample_rate_hz = source.sample_rate_hz();
    recorded.geometry = source.geometry();

    const auto stall_us = std::uint64_t(profile.daemon.stall_timeout_s * 1e6);
    const std::uint64_t start = clock.now_us();
    std::optional<std::uint64_t> last_frame_wall;
    std::optional<std::uint64_t> last_frame_ts;
    bool stalled = false;

    for (;;) {
        if (options.stop && options.stop->load())
            break;
        if (options.max_probes && pacer.probes_sent() >= options.max_probes)
            break;
        if (options.duration_s > 0.0 && double(clock.now_us() - start) >= options.duration_s * 1e6)
            break;

        const std::uint64_t wall = pacer.wait_next(clock);
        std::optional<CsiFrame> frame = source.poll();
        const std::uint64_t transitions_before = engine.gate_transitions();
        const GateMode mode_before = engine.gate().mode;

        if (frame) {
            if (last_frame_ts && frame->timestamp_us <= *last_frame_ts)
                throw ClockError("live source timestamps must increase");
            stalled = false;
            last_frame_wall = wall;
            last_frame_ts = frame->timestamp_us;
            ++summary.frames;
            if (recording)
                recorded.frames.push_back(*frame);
            engine.ingest(*frame);
        } else if (last_frame_wall && !stalled && wall - *last_frame_wall > stall_us) {
            stalled = true;
            ++summary.stalls;
            engine.suspend(*last_frame_ts + stall_us);
        } else if (stalled && last_frame_wall) {
            engine.advance_clock(*last_frame_ts + (wall - *last_frame_wall));
        }

        // One tick can expire the window and re-open it; forward both edges.
        const std::uint64_t changes = engine.gate_transitions() - transitions_before;
        std::vector<GateMode> edges;
        if (changes % 2 == 1)
            edges.push_back(engine.gate().mode);
        else if (changes > 0)
            edges = {mode_before == GateMode::Enabled ? GateMode::Disabled : GateMode::Enabled, mode_before};
        for (GateMode m : edges) {
            const std::string name = m == GateMode::Enabled ? "ENABLE" : "DISABLE";
            summary.actuations.emplace_back(last_frame_ts.value_or(0), name);
            if (actuator)
                actuator->dispatch(name);
        }
    }

    summary.probes = pacer.probes_sent();
    summary.events = engine.events();
    if (recording)
        write_trace_file(recorded, profile.daemon.trace_out);
    return summary;
}

} // namespace vsbutton
