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
#ifndef VSBUTTON_FILTERS_HPP
#define VSBUTTON_FILTERS_HPP

#include <complex>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace vsbutton {

// Sliding median with the boundary value replicated (window-1)/2 times on
// each side. Output has the input's length. Throws ConfigError on an even
// window or one wider than 2*len-1.
std::vector<double> median_filter(std::span<const double> series, std::size_t window);

// y[0] = x[0]; y[n] = b*x[n] + (1-b)*y[n-1] with b = 2/(window+1).
std::vector<double> ema_filter(std::span<const double> series, std::size_t window);

inline double ema_weight(std::size_t window) { return 2.0 / (double(window) + 1.0); }

// One biquad, normalised so a0 = 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
    double b0 = 1, b1 = 0, b2 = 0;
    double a1 = 0, a2 = 0;
};

struct SosFilter {
    std::vector<Biquad> sections;

    // Complex response at `freq_hz` for sampling rate `sample_rate_hz`.
    std::complex<double> response(double freq_hz, double sample_rate_hz) const;
    double magnitude(double freq_hz, double sample_rate_hz) const { return std::abs(response(freq_hz, sample_rate_hz)); }
};

// Digital Butterworth low-pass: analog prototype poles, pre-warped cutoff,
// bilinear transform, grouped into conjugate-pair sections (plus one
// first-order section for odd orders). Each section has unit DC gain.
SosFilter butterworth_design(int order, double cutoff_hz, double sample_rate_hz);

// Causal, zero initial state.
std::vector<double> butterworth_apply(const SosFilter &filter, std::span<const double> series);

// Streaming forms of the three filters. Each carries its own state so the
// pipeline can run one instance per CSI stream.

class SosState {
  public:
    explicit SosState(const SosFilter *filter = nullptr);
    double push(double x);
    void reset();

  private:
    const SosFilter *filter_;
    // Transposed direct form II, two delay elements per section.
    std::vector<double> z_;
};

class EmaState {
  public:
    explicit EmaState(std::size_t window = 1) : beta_(ema_weight(window)) {}
    double push(double x) {
        y_ = primed_ ? beta_ * x + (1.0 - beta_) * y_ : x;
        primed_ = true;
        return y_;
    }
    void reset() { primed_ = false; }

  private:
    double beta_;
    double y_ = 0.0;
    bool primed_ = false;
};

// Centred median needs (window-1)/2 samples of look-ahead, so output lags the
// input by that many samples. The first input is replicated as left padding;
// flush() drains the tail by replicating the last input, reproducing
// median_filter() exactly.
class MedianState {
  public:
    explicit MedianState(std::size_t window = 1);
    // Returns true and writes `out` once a centred window is available.
    bool push(double x, double &out);
    // Emits the remaining lagged outputs.
    std::vector<double> flush();
    void reset();
    std::size_t lag() const { return half_; }

  private:
    double median_of_buffer();

    std::size_t window_;
    std::size_t half_;
    std::deque<double> buf_;
    std::vector<double> scratch_;
    std::size_t pushed_ = 0;
    std::size_t emitted_ = 0;
};

} // namespace vsbutton

#endif
