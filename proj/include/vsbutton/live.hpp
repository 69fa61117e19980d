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
#ifndef VSBUTTON_LIVE_HPP
#define VSBUTTON_LIVE_HPP

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vsbutton/channel.hpp"
#include "vsbutton/config.hpp"
#include "vsbutton/engine.hpp"

namespace vsbutton {

// Where live CSI comes from. poll() is called once per probe and returns the
// frame carried by that probe's reply, or nothing if the reply was lost.
class CsiSource {
  public:
    virtual ~CsiSource() = default;
    virtual std::optional<CsiFrame> poll() = 0;
    virtual Geometry geometry() const = 0;
    virtual double sample_rate_hz() const = 0;
};

// Plays a recorded trace forever, shifting timestamps on each pass so they
// keep increasing.
class ReplayLoopSource : public CsiSource {
  public:
    explicit ReplayLoopSource(CsiStream trace);
    std::optional<CsiFrame> poll() override;
    Geometry geometry() const override { return trace_.geometry; }
    double sample_rate_hz() const override { return trace_.sample_rate_hz; }

  private:
    CsiStream trace_;
    std::size_t next_ = 0;
    std::uint64_t offset_us_ = 0;
    std::uint64_t period_us_ = 0;
};

// Generates frames on demand from a channel model and a looping schedule.
class SyntheticLiveSource : public CsiSource {
  public:
    SyntheticLiveSource(ChannelModel model, std::vector<Segment> schedule, double sample_rate_hz);
    std::optional<CsiFrame> poll() override { return synth_.next(); }
    Geometry geometry() const override { return synth_.geometry(); }
    double sample_rate_hz() const override { return synth_.sample_rate_hz(); }
    const LabelSet &labels() const { return synth_.labels(); }

  private:
    ChannelSynthesizer synth_;
};

class Clock {
  public:
    virtual ~Clock() = default;
    virtual std::uint64_t now_us() = 0;
    virtual void sleep_until(std::uint64_t t_us) = 0;
};

class SteadyClock : public Clock {
  public:
    SteadyClock();
    std::uint64_t now_us() override;
    void sleep_until(std::uint64_t t_us) override;

  private:
    std::chrono::steady_clock::time_point origin_;
};

// Jumps straight to every requested wake-up time.
class VirtualClock : public Clock {
  public:
    std::uint64_t now_us() override { return now_; }
    void sleep_until(std::uint64_t t_us) override {
        if (t_us > now_)
            now_ = t_us;
    }
    void advance(std::uint64_t dt_us) { now_ += dt_us; }

  private:
    std::uint64_t now_ = 0;
};

// Fixed-rate probe schedule standing in for the ICMP echo exchange.
class ProbePacer {
  public:
    ProbePacer(double rate_hz, std::size_t payload_bytes);
    // Sleeps until the next probe is due and counts it as sent.
    std::uint64_t wait_next(Clock &clock);
    std::uint64_t probes_sent() const { return sent_; }
    std::uint64_t bytes_sent() const { return sent_ * payload_; }
    double offered_load_bps() const { return double(payload_) * 8.0 * rate_; }

  private:
    double rate_;
    std::size_t payload_;
    std::uint64_t sent_ = 0;
    std::optional<std::uint64_t> start_us_;
};

class Actuator {
  public:
    virtual ~Actuator() = default;
    // transition is "ENABLE" or "DISABLE". Must not block the caller.
    virtual void dispatch(const std::string &transition) = 0;
};

// Runs an external command per transition on a worker thread. `{transition}`
// in the template is replaced by the transition name; without the
// placeholder the name is appended as an argument.
class CommandActuator : public Actuator {
  public:
    explicit CommandActuator(std::string command_template);
    ~CommandActuator() override;
    CommandActuator(const CommandActuator &) = delete;
    CommandActuator &operator=(const CommandActuator &) = delete;

    void dispatch(const std::string &transition) override;
    // Blocks until every queued command has run.
    void drain();
    static std::string render(const std::string &command_template, const std::string &transition);

  private:
    void worker();

    std::string template_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable idle_cv_;
    std::deque<std::string> queue_;
    bool stopping_ = false;
    bool busy_ = false;
    std::thread thread_;
};

struct LiveOptions {
    std::uint64_t max_probes = 0;   // 0: unbounded
    double duration_s = 0.0;        // 0: unbounded
    const std::atomic<bool> *stop = nullptr;
};

struct LiveSummary {
    std::uint64_t probes = 0;
    std::uint64_t frames = 0;
    std::uint64_t stalls = 0;
    std::vector<MotionEvent> events;
    // (frame timestamp, transition) for every actuator dispatch.
    std::vector<std::pair<std::uint64_t, std::string>> actuations;
    double offered_load_bps = 0.0;
};

// Paces probes, feeds the engine, fires the actuator on gate transitions and
// optionally records the raw trace (profile.daemon.trace_out).
LiveSummary run_live(const Profile &profile, const std::optional<PcaBasis> &basis, CsiSource &source, Clock &clock,
                     Actuator *actuator, EventLog &log, const LiveOptions &options);

} // namespace vsbutton

#endif
