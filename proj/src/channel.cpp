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
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "vsbutton/channel.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

namespace {

constexpr double kRampSeconds = 0.2;
constexpr double kWalkTimeConstantS = 2.0;
// Per-antenna delay offset for MIMO geometries.
constexpr double kAntennaOffsetNs = 0.05;

double ramp(double x) {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    return 0.5 - 0.5 * std::cos(std::numbers::pi * x);
}

bool path_matches(const PathSpec &path, const SessionLabel &label) {
    if (!path.moving || label.kind == SessionKind::NoMotion || path.motion.kind != label.motion)
        return false;
    const bool outdoor = path.wall_traversals > 0;
    return outdoor == (label.kind == SessionKind::OutdoorMotion);
}

} // namespace

MotionProfile standard_motion_profile(Motion motion) {
    switch (motion) {
    case Motion::None:
        return {};
    case Motion::WaveHand:
        return {Motion::WaveHand, 0.05, 1.0, 0.01};
    case Motion::SitDownStandUp:
        return {Motion::SitDownStandUp, 0.08, 0.5, 0.01};
    case Motion::Jump:
        return {Motion::Jump, 0.08, 1.5, 0.01};
    }
    return {};
}

void validate(const ChannelModel &model) {
    int los = 0;
    for (std::size_t i = 0; i < model.paths.size(); ++i) {
        const PathSpec &p = model.paths[i];
        if (!(p.amplitude > 0.0 && p.amplitude <= 1.0))
            throw ModelError(fmt::format("path {}: amplitude {} outside (0, 1]", i, p.amplitude));
        if (!(p.delay_ns > 0.0))
            throw ModelError(fmt::format("path {}: delay must be positive", i));
        if (p.wall_traversals < 0 || p.wall_traversals % 2 != 0)
            throw ModelError(fmt::format("path {}: wall traversals must be an even count", i));
        if (p.moving && (p.motion.kind == Motion::None || p.motion.delay_amplitude_ns < 0.0 ||
                         p.motion.frequency_hz < 0.0 || p.motion.walk_sigma_ns < 0.0))
            throw ModelError(fmt::format("path {}: moving path needs a valid motion profile", i));
        if (p.line_of_sight) {
            ++los;
            if (p.wall_traversals != 0 || p.moving)
                throw ModelError("line-of-sight path must be static and cross no walls");
        }
    }
    if (los != 1)
        throw ModelError(fmt::format("model needs exactly one line-of-sight path, has {}", los));
    if (!(model.wall_transmission > 0.0 && model.wall_transmission < 1.0))
        throw ModelError("wall transmission must lie in (0, 1)");
    if (!(model.noise_sigma >= 0.0) || !std::isfinite(model.noise_sigma))
        throw ModelError("noise sigma must be >= 0");
    if (!(model.carrier_hz > 0.0) || !(model.subcarrier_spacing_hz >= 0.0))
        throw ModelError("carrier and subcarrier spacing must be positive");
    const Geometry &g = model.geometry;
    if (g.n_tx < 1 || g.n_rx < 1 || g.n_sub < 1)
        throw ModelError("geometry dimensions must be >= 1");
}

ChannelSynthesizer::ChannelSynthesizer(ChannelModel model, std::vector<Segment> schedule, double sample_rate_hz,
                                       bool loop)
    : model_(std::move(model)), schedule_(std::move(schedule)), rate_(sample_rate_hz), loop_(loop),
      rng_(model_.seed) {
    validate(model_);
    if (!(rate_ > 0.0))
        throw ModelError("sample rate must be positive");
    if (schedule_.empty())
        throw ModelError("schedule is empty");
    for (const Segment &s : schedule_) {
        if (!(s.duration_s > 0.0))
            throw ModelError("segment durations must be positive");
        validate(s.label);
    }
    frequencies_.resize(model_.geometry.n_sub);
    for (std::size_t i = 0; i < frequencies_.size(); ++i)
        frequencies_[i] = model_.carrier_hz + double(i) * model_.subcarrier_spacing_hz;
    walk_ns_.assign(model_.paths.size(), 0.0);
}

bool ChannelSynthesizer::advance_segment(double t) {
    if (!started_) {
        started_ = true;
        const Segment &s = schedule_[0];
        labels_.push_back({0, std::uint64_t(std::llround(s.duration_s * 1e6)), s.label});
    }
    while (t >= segment_start_s_ + schedule_[segment_].duration_s - 1e-12) {
        segment_start_s_ += schedule_[segment_].duration_s;
        ++segment_;
        if (segment_ == schedule_.size()) {
            if (!loop_)
                return false;
            segment_ = 0;
        }
        const Segment &s = schedule_[segment_];
        labels_.push_back({std::uint64_t(std::llround(segment_start_s_ * 1e6)),
                           std::uint64_t(std::llround((segment_start_s_ + s.duration_s) * 1e6)), s.label});
    }
    return true;
}

ChannelSynthesizer::Active ChannelSynthesizer::activity(const PathSpec &path, double t) const {
    const Segment &s = schedule_[segment_];
    if (!path_matches(path, s.label))
        return {};
    const double into = t - segment_start_s_;
    const double left = segment_start_s_ + s.duration_s - t;
    return {true, std::min(ramp(into / kRampSeconds), ramp(left / kRampSeconds)), into};
}

std::optional<CsiFrame> ChannelSynthesizer::next() {
    const double t = double(index_) / rate_;
    if (!advance_segment(t))
        return std::nullopt;

    const Geometry &g = model_.geometry;
    CsiFrame frame;
    frame.timestamp_us = std::uint64_t(std::llround(t * 1e6));
    frame.n_tx = g.n_tx;
    frame.n_rx = g.n_rx;
    frame.n_sub = g.n_sub;
    frame.h.assign(frame.entries(), cf32{});

    const double dt = 1.0 / rate_;
    const double leak = std::exp(-dt / kWalkTimeConstantS);
    std::vector<std::complex<double>> acc(frame.entries());
    for (std::size_t p = 0; p < model_.paths.size(); ++p) {
        const PathSpec &path = model_.paths[p];
        double delay_ns = path.delay_ns;
        if (path.moving) {
            // The walk is drawn every frame so the random sequence does not depend on the schedule.
            const double step = gauss_(rng_) * path.motion.walk_sigma_ns * std::sqrt(dt);
            const Active a = activity(path, t);
            if (a.active) {
                walk_ns_[p] = leak * walk_ns_[p] + step;
                const double swing = path.motion.delay_amplitude_ns *
                                     std::sin(2.0 * std::numbers::pi * path.motion.frequency_hz * a.phase_time_s);
                delay_ns += a.envelope * (swing + walk_ns_[p]);
            } else {
                walk_ns_[p] = 0.0;
            }
        }
        const double gain = path.amplitude * std::pow(model_.wall_transmission, path.wall_traversals);
        for (std::size_t sub = 0; sub < g.n_sub; ++sub) {
            for (std::size_t tx = 0; tx < g.n_tx; ++tx) {
                for (std::size_t rx = 0; rx < g.n_rx; ++rx) {
                    const double tau = (delay_ns + kAntennaOffsetNs * double(tx + rx)) * 1e-9;
                    const double cycles = frequencies_[sub] * tau;
                    const double phase = -2.0 * std::numbers::pi * (cycles - std::floor(cycles));
                    acc[frame.index(sub, tx, rx)] += std::polar(gain, phase);
                }
            }
        }
    }
    if (model_.noise_sigma > 0.0) {
        const double s = model_.noise_sigma / std::numbers::sqrt2;
        for (auto &v : acc)
            v += std::complex<double>(s * gauss_(rng_), s * gauss_(rng_));
    }
    for (std::size_t j = 0; j < acc.size(); ++j)
        frame.h[j] = cf32(float(acc[j].real()), float(acc[j].imag()));
    ++index_;
    return frame;
}

SynthResult synthesize_schedule(const ChannelModel &model, const std::vector<Segment> &schedule,
                                double sample_rate_hz) {
    ChannelSynthesizer gen(model, schedule, sample_rate_hz);
    double total = 0.0;
    for (const Segment &s : schedule)
        total += s.duration_s;
    SynthResult out;
    out.stream.sample_rate_hz = sample_rate_hz;
    out.stream.geometry = model.geometry;
    out.stream.frames.reserve(std::size_t(std::ceil(total * sample_rate_hz)) + 1);
    while (auto f = gen.next())
        out.stream.frames.push_back(std::move(*f));
    out.labels = gen.labels();
    // Clamp the final label to the end of the last emitted frame period.
    if (!out.labels.empty() && !out.stream.frames.empty())
        out.labels.back().end_us = std::max(out.labels.back().end_us, out.stream.frames.back().timestamp_us + 1);
    return out;
}

SynthResult synthesize(const ChannelModel &model, const SessionLabel &label, double duration_s, double sample_rate_hz,
                       double lead_in_s) {
    validate(model);
    if (!(duration_s > 0.0))
        throw ModelError("duration must be positive");
    std::vector<Segment> schedule;
    if (lead_in_s > 0.0)
        schedule.push_back({{SessionKind::NoMotion, Motion::None, "lead-in"}, lead_in_s});
    schedule.push_back({label, duration_s});
    return synthesize_schedule(model, schedule, sample_rate_hz);
}

std::vector<Segment> burst_schedule(const SessionLabel &label, int count, double burst_s, double gap_s,
                                    double lead_in_s) {
    std::vector<Segment> schedule;
    if (lead_in_s > 0.0)
        schedule.push_back({{SessionKind::NoMotion, Motion::None, "lead-in"}, lead_in_s});
    for (int i = 0; i < count; ++i) {
        schedule.push_back({{SessionKind::NoMotion, Motion::None, "gap"}, gap_s});
        schedule.push_back({label, burst_s});
    }
    return schedule;
}

ChannelModel static_room(std::uint64_t seed) {
    ChannelModel m;
    m.seed = seed;
    PathSpec los;
    los.amplitude = 1.0;
    los.delay_ns = 10.0;
    los.line_of_sight = true;
    m.paths.push_back(los);
    m.paths.push_back({0.5, 23.0, 0, false, false, {}});
    m.paths.push_back({0.3, 31.0, 0, false, false, {}});
    return m;
}

PathSpec moving_reflector(Motion motion, bool outdoor) {
    PathSpec p;
    switch (motion) {
    case Motion::WaveHand:
        p.amplitude = 0.15;
        break;
    case Motion::SitDownStandUp:
        p.amplitude = 0.25;
        break;
    case Motion::Jump:
        p.amplitude = 0.8;
        break;
    case Motion::None:
        throw ModelError("a moving reflector needs a motion");
    }
    p.delay_ns = 17.0;
    p.wall_traversals = outdoor ? 4 : 0;
    p.moving = true;
    p.motion = standard_motion_profile(motion);
    return p;
}

std::vector<Scenario> standard_scenarios() {
    std::vector<Scenario> out;
    out.push_back({"no-motion", static_room(1), {SessionKind::NoMotion, Motion::None, "room"}});
    const std::pair<Motion, const char *> motions[] = {
        {Motion::WaveHand, "wave"}, {Motion::SitDownStandUp, "sit"}, {Motion::Jump, "jump"}};
    std::uint64_t seed = 2;
    for (bool outdoor : {false, true}) {
        for (const auto &[motion, tag] : motions) {
            ChannelModel m = static_room(seed++);
            m.paths.push_back(moving_reflector(motion, outdoor));
            const SessionKind kind = outdoor ? SessionKind::OutdoorMotion : SessionKind::IndoorMotion;
            out.push_back({fmt::format("{}-{}", outdoor ? "outdoor" : "indoor", tag), std::move(m),
                           {kind, motion, outdoor ? "outside" : "inside"}});
        }
    }
    return out;
}

Scenario scenario_by_name(const std::string &name) {
    for (Scenario &s : standard_scenarios())
        if (s.name == name)
            return s;
    throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

} // namespace vsbutton
