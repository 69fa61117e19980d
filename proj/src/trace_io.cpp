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
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "vsbutton/csi.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

static_assert(std::endian::native == std::endian::little, "CSITrace codec assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'S', 'I', 'T'};

class ByteWriter {
  public:
    explicit ByteWriter(std::vector<std::uint8_t> &out) : out_(out) {}

    template <typename T> void put(T value) {
        std::uint8_t raw[sizeof(T)];
        std::memcpy(raw, &value, sizeof(T));
        out_.insert(out_.end(), raw, raw + sizeof(T));
    }
    void bytes(const char *data, std::size_t n) { out_.insert(out_.end(), data, data + n); }

  private:
    std::vector<std::uint8_t> &out_;
};

class ByteReader {
  public:
    explicit ByteReader(const std::vector<std::uint8_t> &in) : in_(in) {}

    template <typename T> T get(const char *what) {
        need(sizeof(T), what);
        T value;
        std::memcpy(&value, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return in_.size() - pos_; }

  private:
    void need(std::size_t n, const char *what) {
        if (remaining() < n)
            throw TruncationError(fmt::format("CSITrace truncated reading {} at byte offset {} ({} of {} bytes present)",
                                              what, pos_, remaining(), n),
                                  pos_);
    }

    const std::vector<std::uint8_t> &in_;
    std::size_t pos_ = 0;
};

std::uint32_t rate_to_millihertz(double hz) {
    const double mhz = std::round(hz * 1000.0);
    if (!(mhz >= 1.0) || mhz > double(UINT32_MAX))
        throw InvariantError(fmt::format("sample rate {} Hz not representable in milli-hertz", hz));
    return std::uint32_t(mhz);
}

} // namespace

void validate(const CsiStream &stream) {
    const Geometry &g = stream.geometry;
    if (g.n_tx < 1 || g.n_rx < 1 || g.n_sub < 1)
        throw InvariantError("geometry dimensions must be >= 1");
    if (!(stream.sample_rate_hz > 0.0) || !std::isfinite(stream.sample_rate_hz))
        throw InvariantError("sample rate must be positive");
    for (std::size_t i = 0; i < stream.frames.size(); ++i) {
        const CsiFrame &f = stream.frames[i];
        if (f.n_tx != g.n_tx || f.n_rx != g.n_rx || f.n_sub != g.n_sub)
            throw InvariantError(fmt::format("frame {} geometry differs from stream geometry", i));
        if (f.h.size() != f.entries())
            throw InvariantError(fmt::format("frame {} has {} entries, expected {}", i, f.h.size(), f.entries()));
        for (const cf32 &v : f.h)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw InvariantError(fmt::format("frame {} has a non-finite CSI entry", i));
        if (i > 0 && f.timestamp_us <= stream.frames[i - 1].timestamp_us)
            throw InvariantError(fmt::format("timestamps not strictly increasing at frame {}", i));
    }
}

PacingReport check_pacing(const CsiStream &stream) {
    PacingReport report;
    report.expected_interval_us = 1e6 / stream.sample_rate_hz;
    if (stream.frames.size() < 2) {
        report.median_interval_us = report.expected_interval_us;
        return report;
    }
    std::vector<double> gaps;
    gaps.reserve(stream.frames.size() - 1);
    for (std::size_t i = 1; i < stream.frames.size(); ++i)
        gaps.push_back(double(stream.frames[i].timestamp_us) - double(stream.frames[i - 1].timestamp_us));
    auto mid = gaps.begin() + gaps.size() / 2;
    std::nth_element(gaps.begin(), mid, gaps.end());
    double median = *mid;
    if (gaps.size() % 2 == 0) {
        const double lower = *std::max_element(gaps.begin(), mid);
        median = 0.5 * (median + lower);
    }
    report.median_interval_us = median;
    report.within_tolerance = std::abs(median - report.expected_interval_us) <= 0.1 * report.expected_interval_us;
    return report;
}

std::size_t trace_size_bytes(const CsiStream &stream) {
    return kTraceHeaderBytes + stream.frames.size() * (8 + stream.geometry.streams() * 8);
}

std::vector<std::uint8_t> encode_trace(const CsiStream &stream) {
    validate(stream);
    if (stream.frames.size() > UINT32_MAX)
        throw InvariantError("too many frames for CSITrace v1");

    std::vector<std::uint8_t> out;
    out.reserve(trace_size_bytes(stream));
    ByteWriter w(out);
    w.bytes(kMagic, 4);
    w.put<std::uint16_t>(kTraceVersion);
    w.put<std::uint8_t>(stream.geometry.n_tx);
    w.put<std::uint8_t>(stream.geometry.n_rx);
    w.put<std::uint16_t>(stream.geometry.n_sub);
    w.put<std::uint32_t>(rate_to_millihertz(stream.sample_rate_hz));
    w.put<std::uint32_t>(std::uint32_t(stream.frames.size()));
    w.put<std::uint16_t>(0);
    for (const CsiFrame &f : stream.frames) {
        w.put<std::uint64_t>(f.timestamp_us);
        for (const cf32 &v : f.h) {
            w.put<float>(v.real());
            w.put<float>(v.imag());
        }
    }
    return out;
}

std::size_t write_trace(const CsiStream &stream, std::ostream &sink) {
    const std::vector<std::uint8_t> bytes = encode_trace(stream);
    const std::streampos start = sink.tellp();
    sink.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
    sink.flush();
    if (!sink) {
        std::size_t written = 0;
        if (start != std::streampos(-1)) {
            sink.clear();
            const std::streampos end = sink.tellp();
            if (end != std::streampos(-1))
                written = std::size_t(end - start);
        }
        throw IoError(fmt::format("trace sink write failed after {} of {} bytes", written, bytes.size()), written);
    }
    return bytes.size();
}

CsiStream decode_trace(const std::vector<std::uint8_t> &bytes) {
    // A short buffer is a truncation as long as what is there agrees with the magic.
    if (bytes.empty())
        throw TruncationError("CSITrace is empty", 0);
    const std::size_t magic_len = std::min<std::size_t>(4, bytes.size());
    if (std::memcmp(bytes.data(), kMagic, magic_len) != 0)
        throw FormatError("not a CSITrace file (bad magic)");

    ByteReader r(bytes);
    r.get<std::uint32_t>("magic");
    const auto version = r.get<std::uint16_t>("version");
    const auto n_tx = r.get<std::uint8_t>("n_tx");
    const auto n_rx = r.get<std::uint8_t>("n_rx");
    const auto n_sub = r.get<std::uint16_t>("n_sub");
    const auto rate_mhz = r.get<std::uint32_t>("sample_rate");
    const auto frame_count = r.get<std::uint32_t>("frame_count");
    const auto reserved = r.get<std::uint16_t>("reserved");
    if (version != kTraceVersion)
        throw FormatError(fmt::format("unsupported CSITrace version {}", version));
    if (reserved != 0)
        throw FormatError("reserved header field is non-zero");
    if (n_tx == 0 || n_rx == 0 || n_sub == 0)
        throw FormatError("header declares a zero dimension");
    if (rate_mhz == 0)
        throw FormatError("header declares a zero sample rate");

    CsiStream stream;
    stream.sample_rate_hz = rate_mhz / 1000.0;
    stream.geometry = {n_tx, n_rx, n_sub};
    const std::size_t entries = stream.geometry.streams();
    const std::size_t frame_bytes = 8 + 8 * entries;
    if (r.remaining() < std::size_t(frame_count) * frame_bytes) {
        // Decode up to the cut so the error names the record that is short.
        const std::size_t whole = r.remaining() / frame_bytes;
        const std::size_t offset = kTraceHeaderBytes + whole * frame_bytes;
        throw TruncationError(fmt::format("CSITrace truncated: header declares {} frames, record {} cut at byte offset {} "
                                          "(file is {} bytes)",
                                          frame_count, whole, offset, bytes.size()),
                              offset);
    }

    stream.frames.resize(frame_count);
    for (CsiFrame &f : stream.frames) {
        f.timestamp_us = r.get<std::uint64_t>("timestamp");
        f.n_tx = n_tx;
        f.n_rx = n_rx;
        f.n_sub = n_sub;
        f.h.resize(entries);
        for (cf32 &v : f.h) {
            const float re = r.get<float>("real");
            const float im = r.get<float>("imag");
            v = {re, im};
        }
    }
    if (r.remaining() != 0)
        throw FormatError(fmt::format("{} bytes of trailing data after the last frame", r.remaining()));
    validate(stream);
    return stream;
}

CsiStream read_trace(std::istream &source) {
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return decode_trace(bytes);
}

void write_trace_file(const CsiStream &stream, const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(fmt::format("cannot open {} for writing", path), 0);
    write_trace(stream, out);
}

CsiStream read_trace_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot open trace {}", path));
    return read_trace(in);
}

} // namespace vsbutton
