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
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "vsbutton/csi.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

void validate(const SessionLabel &label) {
    if ((label.kind == SessionKind::NoMotion) != (label.motion == Motion::None))
        throw InvariantError("label kind NO_MOTION must pair with motion NONE and vice versa");
}

std::string to_string(SessionKind kind) {
    switch (kind) {
    case SessionKind::NoMotion:
        return "NO_MOTION";
    case SessionKind::IndoorMotion:
        return "INDOOR_MOTION";
    case SessionKind::OutdoorMotion:
        return "OUTDOOR_MOTION";
    }
    return "?";
}

std::string to_string(Motion motion) {
    switch (motion) {
    case Motion::None:
        return "NONE";
    case Motion::WaveHand:
        return "WAVE_HAND";
    case Motion::SitDownStandUp:
        return "SIT_DOWN_STAND_UP";
    case Motion::Jump:
        return "JUMP";
    }
    return "?";
}

SessionKind parse_session_kind(const std::string &text) {
    if (text == "NO_MOTION")
        return SessionKind::NoMotion;
    if (text == "INDOOR_MOTION")
        return SessionKind::IndoorMotion;
    if (text == "OUTDOOR_MOTION")
        return SessionKind::OutdoorMotion;
    throw FormatError(fmt::format("unknown session kind '{}'", text));
}

Motion parse_motion(const std::string &text) {
    if (text == "NONE")
        return Motion::None;
    if (text == "WAVE_HAND")
        return Motion::WaveHand;
    if (text == "SIT_DOWN_STAND_UP")
        return Motion::SitDownStandUp;
    if (text == "JUMP")
        return Motion::Jump;
    throw FormatError(fmt::format("unknown motion '{}'", text));
}

void write_labels(const LabelSet &labels, std::ostream &out) {
    out << "# start_us,end_us,kind,motion,location_tag\n";
    for (const LabelRange &r : labels)
        out << r.start_us << ',' << r.end_us << ',' << to_string(r.label.kind) << ',' << to_string(r.label.motion) << ','
            << r.label.location_tag << '\n';
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string &s, std::size_t line) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-')
        throw FormatError(fmt::format("labels line {}: '{}' is not an unsigned integer", line, s));
    return v;
}

} // namespace

LabelSet read_labels(std::istream &in) {
    LabelSet labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        // The location tag is last and may itself contain commas.
        for (int i = 0; i < 4 && std::getline(ss, field, ','); ++i)
            fields.push_back(trim(field));
        std::string rest;
        std::getline(ss, rest);
        fields.push_back(trim(rest));
        if (fields.size() != 5)
            throw FormatError(fmt::format("labels line {}: expected 5 fields", lineno));
        LabelRange r;
        r.start_us = parse_u64(fields[0], lineno);
        r.end_us = parse_u64(fields[1], lineno);
        r.label.kind = parse_session_kind(fields[2]);
        r.label.motion = parse_motion(fields[3]);
        r.label.location_tag = fields[4];
        if (r.end_us <= r.start_us)
            throw FormatError(fmt::format("labels line {}: empty or reversed range", lineno));
        validate(r.label);
        labels.push_back(std::move(r));
    }
    return labels;
}

void write_labels_file(const LabelSet &labels, const std::string &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError(fmt::format("cannot open {} for writing", path), 0);
    write_labels(labels, out);
    if (!out)
        throw IoError(fmt::format("failed writing {}", path), 0);
}

LabelSet read_labels_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error(fmt::format("cannot open labels {}", path));
    return read_labels(in);
}

std::ptrdiff_t find_label(const LabelSet &labels, std::uint64_t t) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].contains(t))
            return std::ptrdiff_t(i);
    return -1;
}

} // namespace vsbutton
