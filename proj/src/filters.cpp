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
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/filters.hpp"

namespace vsbutton {

namespace {

double median_in_place(std::vector<double> &v) {
    auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

} // namespace

std::vector<double> median_filter(std::span<const double> series, std::size_t window) {
    if (window == 0 || window % 2 == 0)
        throw ConfigError(fmt::format("median window must be odd, got {}", window));
    if (series.empty())
        return {};
    if (window > 2 * series.size() - 1)
        throw ConfigError(fmt::format("median window {} too wide for {} samples", window, series.size()));

    const std::size_t half = window / 2;
    const std::ptrdiff_t n = std::ptrdiff_t(series.size());
    std::vector<double> out(series.size());
    std::vector<double> w(window);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < window; ++k) {
            const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i + std::ptrdiff_t(k) - std::ptrdiff_t(half), 0, n - 1);
            w[k] = series[std::size_t(j)];
        }
        out[std::size_t(i)] = median_in_place(w);
    }
    return out;
}

std::vector<double> ema_filter(std::span<const double> series, std::size_t window) {
    if (window == 0)
        throw ConfigError("EMA window must be >= 1");
    EmaState state(window);
    std::vector<double> out;
    out.reserve(series.size());
    for (double x : series)
        out.push_back(state.push(x));
    return out;
}

std::complex<double> SosFilter::response(double freq_hz, double sample_rate_hz) const {
    const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h = 1.0;
    for (const Biquad &s : sections)
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    return h;
}

SosFilter butterworth_design(int order, double cutoff_hz, double sample_rate_hz) {
    if (order < 1)
        throw ConfigError("Butterworth order must be >= 1");
    if (!(sample_rate_hz > 0.0))
        throw ConfigError("sample rate must be positive");
    if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0))
        throw ConfigError(fmt::format("cutoff {} Hz must lie in (0, {}) for {} Hz sampling", cutoff_hz,
                                      sample_rate_hz / 2.0, sample_rate_hz));

    const double fs2 = 2.0 * sample_rate_hz;
    // Pre-warp so the digital -3 dB point lands exactly on cutoff_hz.
    const double warped = fs2 * std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    auto bilinear = [&](std::complex<double> s) { return (fs2 + s) / (fs2 - s); };

    SosFilter filter;
    // Left-half-plane poles s_k = wc * exp(j*pi*(2k + N + 1) / (2N)); take one of each conjugate pair.
    for (int k = 0; k < order / 2; ++k) {
        const double theta = std::numbers::pi * double(2 * k + order + 1) / double(2 * order);
        const std::complex<double> zp = bilinear(warped * std::polar(1.0, theta));
        Biquad s;
        s.a1 = -2.0 * zp.real();
        s.a2 = std::norm(zp);
        // Zeros at z = -1; scale numerator for unit gain at z = 1.
        const double g = (1.0 + s.a1 + s.a2) / 4.0;
        s.b0 = g;
        s.b1 = 2.0 * g;
        s.b2 = g;
        filter.sections.push_back(s);
    }
    if (order % 2 == 1) {
        const double zp = bilinear(std::complex<double>(-warped, 0.0)).real();
        Biquad s;
        s.a1 = -zp;
        s.a2 = 0.0;
        const double g = (1.0 - zp) / 2.0;
        s.b0 = g;
        s.b1 = g;
        s.b2 = 0.0;
        filter.sections.push_back(s);
    }
    return filter;
}

std::vector<double> butterworth_apply(const SosFilter &filter, std::span<const double> series) {
    if (series.empty())
        throw EmptyInputError("Butterworth input is empty");
    SosState state(&filter);
    std::vector<double> out;
    out.reserve(series.size());
    for (double x : series)
        out.push_back(state.push(x));
    return out;
}

SosState::SosState(const SosFilter *filter) : filter_(filter) {
    if (filter_)
        z_.assign(2 * filter_->sections.size(), 0.0);
}

double SosState::push(double x) {
    double v = x;
    for (std::size_t i = 0; i < filter_->sections.size(); ++i) {
        const Biquad &s = filter_->sections[i];
        double &z0 = z_[2 * i];
        double &z1 = z_[2 * i + 1];
        const double y = s.b0 * v + z0;
        z0 = s.b1 * v - s.a1 * y + z1;
        z1 = s.b2 * v - s.a2 * y;
        v = y;
    }
    return v;
}

void SosState::reset() { std::fill(z_.begin(), z_.end(), 0.0); }

MedianState::MedianState(std::size_t window) : window_(window), half_(window / 2) {
    if (window == 0 || window % 2 == 0)
        throw ConfigError(fmt::format("median window must be odd, got {}", window));
    scratch_.reserve(window);
}

double MedianState::median_of_buffer() {
    scratch_.assign(buf_.begin(), buf_.end());
    return median_in_place(scratch_);
}

bool MedianState::push(double x, double &out) {
    if (pushed_ == 0)
        buf_.assign(half_, x);
    buf_.push_back(x);
    ++pushed_;
    if (buf_.size() > window_)
        buf_.pop_front();
    if (buf_.size() < window_)
        return false;
    out = median_of_buffer();
    ++emitted_;
    return true;
}

std::vector<double> MedianState::flush() {
    std::vector<double> out;
    if (pushed_ == 0)
        return out;
    const double last = buf_.back();
    while (emitted_ < pushed_) {
        buf_.push_back(last);
        if (buf_.size() > window_)
            buf_.pop_front();
        if (buf_.size() == window_) {
            out.push_back(median_of_buffer());
            ++emitted_;
        }
    }
    return out;
}

void MedianState::reset() {
    buf_.clear();
    pushed_ = 0;
    emitted_ = 0;
}

} // namespace vsbutton
