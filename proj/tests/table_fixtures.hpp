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
#ifndef VSBUTTON_TESTS_TABLE_FIXTURES_HPP
#define VSBUTTON_TESTS_TABLE_FIXTURES_HPP

#include <array>
#include <string>
#include <vector>

#include "vsbutton/detector.hpp"

namespace vsbutton::fixtures {

// Session maxima per motion (rows) and location (columns). A..D are inside
// the room, the primed locations and M', N' outside.
inline constexpr std::array<const char *, 10> kLocations = {"A", "B", "C", "D", "A'", "B'", "C'", "D'", "M'", "N'"};

struct DistanceTable {
    std::array<double, 10> wave, sit, jump, nothing;
};

inline constexpr DistanceTable kSquareRoomConfig1 = {
    {0.218, 0.213, 0.195, 0.191, 0.104, 0.101, 0.079, 0.083, 0.156, 0.121},
    {0.277, 0.271, 0.258, 0.253, 0.118, 0.113, 0.088, 0.092, 0.238, 0.139},
    {0.392, 0.391, 0.371, 0.366, 0.132, 0.128, 0.099, 0.103, 0.373, 0.165},
    {0.026, 0.021, 0.027, 0.024, 0.023, 0.027, 0.028, 0.023, 0.020, 0.023},
};

inline constexpr DistanceTable kSquareRoomConfig2 = {
    {0.312, 0.315, 0.401, 0.409, 0.041, 0.043, 0.049, 0.051, 0.092, 0.063},
    {0.345, 0.349, 0.423, 0.430, 0.060, 0.062, 0.069, 0.071, 0.121, 0.089},
    {0.401, 0.407, 0.451, 0.459, 0.069, 0.071, 0.084, 0.086, 0.241, 0.099},
    {0.025, 0.021, 0.022, 0.024, 0.028, 0.026, 0.021, 0.022, 0.023, 0.025},
};

inline constexpr DistanceTable kRectangleRoom = {
    {0.147, 0.150, 0.180, 0.183, 0.020, 0.022, 0.025, 0.027, 0.035, 0.030},
    {0.181, 0.184, 0.216, 0.217, 0.024, 0.026, 0.028, 0.029, 0.039, 0.033},
    {0.254, 0.255, 0.287, 0.288, 0.029, 0.029, 0.032, 0.033, 0.042, 0.035},
    {0.022, 0.021, 0.022, 0.027, 0.028, 0.026, 0.021, 0.022, 0.020, 0.025},
};

struct TableSessions {
    std::vector<SessionStats> indoor, outdoor, nothing;
};

inline TableSessions sessions_from(const DistanceTable &t) {
    TableSessions out;
    const std::array<std::pair<Motion, const std::array<double, 10> *>, 3> rows = {
        {{Motion::WaveHand, &t.wave}, {Motion::SitDownStandUp, &t.sit}, {Motion::Jump, &t.jump}}};
    for (std::size_t loc = 0; loc < kLocations.size(); ++loc) {
        const bool inside = loc < 4;
        for (const auto &[motion, row] : rows) {
            SessionStats s{{inside ? SessionKind::IndoorMotion : SessionKind::OutdoorMotion, motion, kLocations[loc]},
                           (*row)[loc], 1};
            (inside ? out.indoor : out.outdoor).push_back(s);
        }
        out.nothing.push_back({{SessionKind::NoMotion, Motion::None, kLocations[loc]}, t.nothing[loc], 1});
    }
    return out;
}

} // namespace vsbutton::fixtures

#endif
