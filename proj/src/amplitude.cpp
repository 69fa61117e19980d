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

#include "vsbutton/csi.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

void frame_amplitudes(const CsiFrame &frame, double *out) {
    for (std::size_t j = 0; j < frame.h.size(); ++j)
        out[j] = std::hypot(double(frame.h[j].real()), double(frame.h[j].imag()));
}

Matrix csi_amplitude_streams(const CsiStream &stream) {
    if (stream.frames.empty())
        throw EmptyInputError("amplitude extraction needs at least one frame");
    const std::size_t cols = stream.geometry.streams();
    Matrix out(Eigen::Index(stream.frames.size()), Eigen::Index(cols));
    for (std::size_t r = 0; r < stream.frames.size(); ++r) {
        if (stream.frames[r].h.size() != cols)
            throw GeometryError("frame geometry differs from stream geometry");
        frame_amplitudes(stream.frames[r], out.row(Eigen::Index(r)).data());
    }
    return out;
}

} // namespace vsbutton
