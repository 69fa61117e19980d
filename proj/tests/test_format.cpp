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
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "vsbutton/csi.hpp"
#include "vsbutton/errors.hpp"

using namespace vsbutton;

namespace {

CsiStream make_stream(std::size_t frames, std::uint8_t tx, std::uint8_t rx, std::uint16_t sub, std::uint32_t seed = 1) {
    std::mt19937 rng(seed);
    std::normal_distribution<float> g;
    CsiStream s;
    s.sample_rate_hz = 50.0;
    s.geometry = {tx, rx, sub};
    for (std::size_t k = 0; k < frames; ++k) {
        CsiFrame f;
        f.timestamp_us = 1000 + k * 20000;
        f.n_tx = tx;
        f.n_rx = rx;
        f.n_sub = sub;
        f.h.resize(f.entries());
        for (auto &c : f.h)
            c = {g(rng), g(rng)};
        s.frames.push_back(f);
    }
    return s;
}

std::uint32_t read_u32(const std::vector<std::uint8_t> &b, std::size_t at) {
    return std::uint32_t(b[at]) | std::uint32_t(b[at + 1]) << 8 | std::uint32_t(b[at + 2]) << 16 |
           std::uint32_t(b[at + 3]) << 24;
}

} // namespace

TEST(TraceFormat, EmptyStreamIsHeaderOnly) {
    CsiStream s;
    s.sample_rate_hz = 50.0;
    EXPECT_EQ(trace_size_bytes(s), 20u);
    const auto bytes = encode_trace(s);
    ASSERT_EQ(bytes.size(), 20u);
    EXPECT_EQ(std::memcmp(bytes.data(), "CSIT", 4), 0);
    EXPECT_EQ(bytes[4] | bytes[5] << 8, 1);
    EXPECT_EQ(read_u32(bytes, 10), 50000u);
    EXPECT_EQ(read_u32(bytes, 14), 0u);
    EXPECT_EQ(decode_trace(bytes).frames.size(), 0u);
}

TEST(TraceFormat, OneFrameTwoSubcarriersIs44Bytes) {
    const CsiStream s = make_stream(1, 1, 1, 2);
    EXPECT_EQ(trace_size_bytes(s), 44u);
    EXPECT_EQ(encode_trace(s).size(), 44u);
}

TEST(TraceFormat, HeaderFieldsAndLayout) {
    CsiStream s = make_stream(1, 2, 3, 4);
    s.frames[0].timestamp_us = 0x0102030405060708ull;
    s.frames[0].at(1, 0, 2) = {1.5f, -2.0f};
    const auto b = encode_trace(s);
    EXPECT_EQ(b[6], 2);
    EXPECT_EQ(b[7], 3);
    EXPECT_EQ(b[8] | b[9] << 8, 4);
    EXPECT_EQ(read_u32(b, 14), 1u);
    EXPECT_EQ(b[18], 0);
    EXPECT_EQ(b[19], 0);
    EXPECT_EQ(b[20], 0x08);
    EXPECT_EQ(b[27], 0x01);
    const std::size_t entry = (1 * 2 + 0) * 3 + 2;
    float re, im;
    std::memcpy(&re, &b[28 + entry * 8], 4);
    std::memcpy(&im, &b[32 + entry * 8], 4);
    EXPECT_EQ(re, 1.5f);
    EXPECT_EQ(im, -2.0f);
}

TEST(TraceFormat, RoundTripHundredFrames) {
    const CsiStream s = make_stream(100, 1, 1, 30);
    std::stringstream buf;
    EXPECT_EQ(write_trace(s, buf), trace_size_bytes(s));
    const CsiStream back = read_trace(buf);
    EXPECT_EQ(back.frames, s.frames);
    EXPECT_EQ(back.geometry, s.geometry);
    EXPECT_EQ(back.sample_rate_hz, s.sample_rate_hz);
}

TEST(TraceFormat, RandomGeometriesRoundTrip) {
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        const CsiStream s = make_stream(rng() % 5, std::uint8_t(1 + rng() % 4), std::uint8_t(1 + rng() % 4),
                                        std::uint16_t(1 + rng() % 57), rng());
        const auto bytes = encode_trace(s);
        EXPECT_EQ(encode_trace(decode_trace(bytes)), bytes);
    }
}

TEST(TraceFormat, BadMagicIsFormatError) {
    auto bytes = encode_trace(make_stream(2, 1, 1, 3));
    bytes[0] = 'X';
    EXPECT_THROW(decode_trace(bytes), FormatError);
}

TEST(TraceFormat, BadVersionIsFormatError) {
    auto bytes = encode_trace(make_stream(1, 1, 1, 3));
    bytes[4] = 2;
    EXPECT_THROW(decode_trace(bytes), FormatError);
}

TEST(TraceFormat, CutMidComplexPairIsTruncation) {
    const auto full = encode_trace(make_stream(1, 1, 1, 4));
    const std::vector<std::uint8_t> cut(full.begin(), full.begin() + 20 + 8 + 12);
    try {
        decode_trace(cut);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError &e) {
        EXPECT_EQ(e.offset(), 20u);
    }
}

TEST(TraceFormat, EveryPrefixTruncates) {
    const auto full = encode_trace(make_stream(3, 2, 1, 5));
    for (std::size_t n = 0; n < full.size(); ++n)
        EXPECT_THROW(decode_trace(std::vector<std::uint8_t>(full.begin(), full.begin() + long(n))), TruncationError)
            << "prefix " << n;
}

TEST(TraceFormat, TrailingBytesAreFormatError) {
    auto bytes = encode_trace(make_stream(2, 1, 1, 3));
    bytes.push_back(0);
    EXPECT_THROW(decode_trace(bytes), FormatError);
}

TEST(TraceFormat, NonIncreasingTimestampsRejected) {
    CsiStream s = make_stream(3, 1, 1, 2);
    s.frames[2].timestamp_us = s.frames[1].timestamp_us;
    EXPECT_THROW(validate(s), InvariantError);
    EXPECT_THROW(encode_trace(s), InvariantError);
}

TEST(TraceFormat, FrameGeometryMustMatchStream) {
    CsiStream s = make_stream(2, 1, 1, 2);
    s.frames[1].n_sub = 3;
    s.frames[1].h.resize(3);
    EXPECT_THROW(validate(s), InvariantError);
}

TEST(TraceFormat, PacingReport) {
    CsiStream s = make_stream(20, 1, 1, 1);
    EXPECT_TRUE(check_pacing(s).within_tolerance);
    EXPECT_DOUBLE_EQ(check_pacing(s).median_interval_us, 20000.0);
    for (std::size_t k = 0; k < s.frames.size(); ++k)
        s.frames[k].timestamp_us = k * 40000;
    EXPECT_FALSE(check_pacing(s).within_tolerance);
}

TEST(Amplitude, UnitAndPythagorean) {
    CsiStream s = make_stream(2, 1, 2, 3);
    for (auto &c : s.frames[0].h)
        c = {1.0f, 0.0f};
    s.frames[1].at(2, 0, 1) = {3.0f, 4.0f};
    const Matrix a = csi_amplitude_streams(s);
    ASSERT_EQ(a.rows(), 2);
    ASSERT_EQ(a.cols(), 6);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        EXPECT_EQ(a(0, j), 1.0);
    EXPECT_DOUBLE_EQ(a(1, Eigen::Index(s.frames[1].index(2, 0, 1))), 5.0);
}

TEST(Amplitude, MatchesScalarMagnitudes) {
    const CsiStream s = make_stream(10, 2, 2, 7);
    const Matrix a = csi_amplitude_streams(s);
    for (std::size_t r = 0; r < s.frames.size(); ++r)
        for (std::size_t j = 0; j < s.frames[r].h.size(); ++j) {
            const double re = s.frames[r].h[j].real(), im = s.frames[r].h[j].imag();
            EXPECT_NEAR(a(Eigen::Index(r), Eigen::Index(j)), std::sqrt(re * re + im * im), 1e-12);
            EXPECT_GE(a(Eigen::Index(r), Eigen::Index(j)), 0.0);
        }
}

TEST(Amplitude, SwappingAntennasPermutesColumns) {
    CsiStream s = make_stream(3, 2, 3, 4);
    CsiStream t = s;
    t.geometry = {3, 2, 4};
    for (std::size_t k = 0; k < s.frames.size(); ++k) {
        CsiFrame &f = t.frames[k];
        f.n_tx = 3;
        f.n_rx = 2;
        for (std::size_t sub = 0; sub < 4; ++sub)
            for (std::size_t tx = 0; tx < 2; ++tx)
                for (std::size_t rx = 0; rx < 3; ++rx)
                    f.at(sub, rx, tx) = s.frames[k].at(sub, tx, rx);
    }
    const Matrix a = csi_amplitude_streams(s), b = csi_amplitude_streams(t);
    for (std::size_t sub = 0; sub < 4; ++sub)
        for (std::size_t tx = 0; tx < 2; ++tx)
            for (std::size_t rx = 0; rx < 3; ++rx)
                EXPECT_EQ(a.col(Eigen::Index(s.frames[0].index(sub, tx, rx))),
                          b.col(Eigen::Index(t.frames[0].index(sub, rx, tx))));
}

TEST(Amplitude, EmptyStreamThrows) {
    CsiStream s;
    EXPECT_THROW(csi_amplitude_streams(s), EmptyInputError);
}

TEST(Labels, RoundTripAndComments) {
    const LabelSet labels = {
        {0, 6000000, {SessionKind::NoMotion, Motion::None, "lead-in"}},
        {6000000, 9000000, {SessionKind::IndoorMotion, Motion::WaveHand, "A"}},
        {9000000, 12000000, {SessionKind::OutdoorMotion, Motion::Jump, "hall, by the door"}},
    };
    std::stringstream buf;
    write_labels(labels, buf);
    std::stringstream with_comments("# header\n\n" + buf.str());
    EXPECT_EQ(read_labels(with_comments), labels);
}

TEST(Labels, HalfOpenLookup) {
    const LabelSet labels = {{0, 10, {}}, {10, 20, {SessionKind::IndoorMotion, Motion::Jump, "B"}}};
    EXPECT_EQ(find_label(labels, 9), 0);
    EXPECT_EQ(find_label(labels, 10), 1);
    EXPECT_EQ(find_label(labels, 20), -1);
}

TEST(Labels, MalformedRecords) {
    std::stringstream few("0,10,NO_MOTION\n");
    EXPECT_THROW(read_labels(few), FormatError);
    std::stringstream kind("0,10,SIDEWAYS,NONE,x\n");
    EXPECT_THROW(read_labels(kind), FormatError);
    std::stringstream inverted("10,5,NO_MOTION,NONE,x\n");
    EXPECT_THROW(read_labels(inverted), Error);
    std::stringstream mismatch("0,10,NO_MOTION,JUMP,x\n");
    EXPECT_THROW(read_labels(mismatch), InvariantError);
}
