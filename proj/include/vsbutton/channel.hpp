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
#ifndef VSBUTTON_CHANNEL_HPP
#define VSBUTTON_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vsbutton/csi.hpp"

namespace vsbutton {

// Delay oscillation of a moving reflector while it performs a motion.
struct MotionProfile {
    Motion kind = Motion::None;
    double delay_amplitude_ns = 0.0;
    double frequency_hz = 0.0;
    // Leaky random walk added on top of the sinusoid, ns per sqrt(second).
    double walk_sigma_ns = 0.0;
};

// Preset profile for a motion. Intensity rises WAVE_HAND < SIT_DOWN_STAND_UP < JUMP.
MotionProfile standard_motion_profile(Motion motion);

struct PathSpec {
    double amplitude = 1.0; // a_p in (0, 1]
    double delay_ns = 10.0; // rest delay, > 0
    int wall_traversals = 0;
    bool line_of_sight = false;
    bool moving = false;
    MotionProfile motion;
};

struct ChannelModel {
    std::vector<PathSpec> paths;
    double wall_transmission = 0.45; // gamma, per traversal
    double noise_sigma = 0.003;      // std-dev of complex noise per entry
    double subcarrier_spacing_hz = 625e3;
    double carrier_hz = 2.437e9;
    std::uint64_t seed = 1;
    Geometry geometry{1, 1, 30};
};

// Throws ModelError.
void validate(const ChannelModel &model);

// Piece of a synthesis schedule. A moving path performs its motion during a
// segment when the segment's motion matches the path's profile and the
// segment's kind matches the path's side of the wall (indoor paths have zero
// traversals, outdoor ones an even count >= 2).
struct Segment {
    SessionLabel label;
    double duration_s = 0.0;
};

struct SynthResult {
    CsiStream stream;
    LabelSet labels;
};

// Frame-by-frame generator; synthesize() and the live synthetic source are both
// built on it. Deterministic given the model seed.
class ChannelSynthesizer {
  public:
    ChannelSynthesizer(ChannelModel model, std::vector<Segment> schedule, double sample_rate_hz, bool loop = false);

    // Next frame, or nullopt once a non-looping schedule is exhausted.
    std::optional<CsiFrame> next();

    // Labels of every segment started so far (absolute times).
    const LabelSet &labels() const { return labels_; }
    std::uint64_t frames_emitted() const { return index_; }
    double sample_rate_hz() const { return rate_; }
    const Geometry &geometry() const { return model_.geometry; }

  private:
    struct Active {
        bool active = false;
        double envelope = 0.0;
        double phase_time_s = 0.0;
    };

    bool advance_segment(double t);
    Active activity(const PathSpec &path, double t) const;

    ChannelModel model_;
    std::vector<Segment> schedule_;
    double rate_;
    bool loop_;
    std::uint64_t index_ = 0;
    std::size_t segment_ = 0;
    double segment_start_s_ = 0.0;
    bool started_ = false;
    LabelSet labels_;
    std::vector<double> frequencies_;
    std::vector<double> walk_ns_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

// Motion-free lead-in (labelled NO_MOTION) followed by duration_s of `label`.
SynthResult synthesize(const ChannelModel &model, const SessionLabel &label, double duration_s, double sample_rate_hz,
                       double lead_in_s = 6.0);

SynthResult synthesize_schedule(const ChannelModel &model, const std::vector<Segment> &schedule,
                                double sample_rate_hz);

// lead-in, then `count` repetitions of (gap of no motion, burst of `label`).
std::vector<Segment> burst_schedule(const SessionLabel &label, int count, double burst_s, double gap_s,
                                    double lead_in_s = 6.0);

struct Scenario {
    std::string name;
    ChannelModel model;
    SessionLabel label;
};

// Static room shared by every preset: LoS plus two fixed indoor reflectors.
ChannelModel static_room(std::uint64_t seed = 1);

// Reflector performing `motion`, inside the room or behind the walls.
PathSpec moving_reflector(Motion motion, bool outdoor);

// no-motion, indoor-{wave,sit,jump}, outdoor-{wave,sit,jump}.
std::vector<Scenario> standard_scenarios();
Scenario scenario_by_name(const std::string &name);

} // namespace vsbutton

#endif
