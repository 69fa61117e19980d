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

#ifndef VSBUTTON_CSI_HPP
#define VSBUTTON_CSI_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vsbutton {

using cf32 = std::complex<float>;

// One CSI measurement. Entries of h are laid out subcarrier-major, then tx,
// then rx: index = (sub * n_tx + tx) * n_rx + rx.
struct CsiFrame {
    std::uint64_t timestamp_us = 0;
    std::uint8_t n_tx = 1;
    std::uint8_t n_rx = 1;
    std::uint16_t n_sub = 1;
    std::vector<cf32> h;

    std::size_t entries() const { return std::size_t(n_sub) * n_tx * n_rx; }
    std::size_t index(std::size_t sub, std::size_t tx, std::size_t rx) const { return (sub * n_tx + tx) * n_rx + rx; }
    cf32 &at(std::size_t sub, std::size_t tx, std::size_t rx) { return h[index(sub, tx, rx)]; }
    const cf32 &at(std::size_t sub, std::size_t tx, std::size_t rx) const { return h[index(sub, tx, rx)]; }

    bool operator==(const CsiFrame &) const = default;
};

struct Geometry {
    std::uint8_t n_tx = 1;
    std::uint8_t n_rx = 1;
    std::uint16_t n_sub = 1;

    std::size_t streams() const { return std::size_t(n_sub) * n_tx * n_rx; }
    bool operator==(const Geometry &) const = default;
};

struct CsiStream {
    double sample_rate_hz = 50.0;
    Geometry geometry;
    std::vector<CsiFrame> frames;

    bool operator==(const CsiStream &) const = default;
};

// Hard invariants: shared geometry, finite entries, strictly increasing
// timestamps, non-zero dimensions. Throws InvariantError.
void validate(const CsiStream &stream);

struct PacingReport {
    double expected_interval_us = 0.0;
    double median_interval_us = 0.0;
    bool within_tolerance = true;
};

// Soft check: median inter-frame interval within 10% of 1/sample_rate.
PacingReport check_pacing(const CsiStream &stream);

// ---------------------------------------------------------------------------
// Labels

enum class SessionKind { NoMotion, IndoorMotion, OutdoorMotion };
enum class Motion { None, WaveHand, SitDownStandUp, Jump };

struct SessionLabel {
    SessionKind kind = SessionKind::NoMotion;
    Motion motion = Motion::None;
    std::string location_tag;

    bool operator==(const SessionLabel &) const = default;
};

// kind == NoMotion <=> motion == None. Throws InvariantError.
void validate(const SessionLabel &label);

std::string to_string(SessionKind kind);
std::string to_string(Motion motion);
SessionKind parse_session_kind(const std::string &text);
Motion parse_motion(const std::string &text);

// Half-open [start_us, end_us) span of a trace carrying one label.
struct LabelRange {
    std::uint64_t start_us = 0;
    std::uint64_t end_us = 0;
    SessionLabel label;

    bool contains(std::uint64_t t) const { return t >= start_us && t < end_us; }
    bool operator==(const LabelRange &) const = default;
};

using LabelSet = std::vector<LabelRange>;

// Sidecar format, one record per line:
//   start_us,end_us,kind,motion,location_tag
// Lines starting with '#' and blank lines are ignored.
void write_labels(const LabelSet &labels, std::ostream &out);
LabelSet read_labels(std::istream &in);
void write_labels_file(const LabelSet &labels, const std::string &path);
LabelSet read_labels_file(const std::string &path);

// Index of the range containing t, or -1.
std::ptrdiff_t find_label(const LabelSet &labels, std::uint64_t t);

// ---------------------------------------------------------------------------
// CSITrace v1

inline constexpr std::size_t kTraceHeaderBytes = 20;
inline constexpr std::uint16_t kTraceVersion = 1;

std::size_t trace_size_bytes(const CsiStream &stream);

// Returns the number of bytes written. Throws IoError if the sink fails.
std::size_t write_trace(const CsiStream &stream, std::ostream &sink);
std::vector<std::uint8_t> encode_trace(const CsiStream &stream);

CsiStream read_trace(std::istream &source);
CsiStream decode_trace(const std::vector<std::uint8_t> &bytes);

void write_trace_file(const CsiStream &stream, const std::string &path);
CsiStream read_trace_file(const std::string &path);

// ---------------------------------------------------------------------------

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Row r, column j holds |h_j| of frame r, columns in the frame's storage order.
Matrix csi_amplitude_streams(const CsiStream &stream);

// Magnitudes of a single frame, same column order.
void frame_amplitudes(const CsiFrame &frame, double *out);

} // namespace vsbutton

#endif
