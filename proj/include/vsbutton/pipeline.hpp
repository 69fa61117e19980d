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
#ifndef VSBUTTON_PIPELINE_HPP
#define VSBUTTON_PIPELINE_HPP

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "vsbutton/csi.hpp"
#include "vsbutton/filters.hpp"
#include "vsbutton/pca.hpp"

namespace vsbutton {

enum class PipelineOrder { FilterFirst, PcaFirst };

struct PipelineConfig {
    std::size_t median_window = 9;
    std::size_t ema_window = 15;
    int butterworth_order = 4;
    double butterworth_cutoff_hz = 10.0;
    double sample_rate_hz = 50.0;
    std::vector<int> pca_keep{2, 3, 4};
    PipelineOrder order = PipelineOrder::FilterFirst;
    // Leading outputs discarded while the Butterworth stage settles from zero state.
    std::size_t settle_samples = 50;
};

// Throws ConfigError.
void validate(const PipelineConfig &config);

struct FeatureSample {
    std::uint64_t timestamp_us = 0;
    Vector values;
};

// Amplitudes after median -> EMA -> Butterworth on every column.
Matrix filter_columns(const Matrix &amplitudes, const PipelineConfig &config);

// Rows the PCA basis is fitted on for this pipeline order: filtered amplitudes
// (filter-first) or raw amplitudes (pca-first).
Matrix basis_rows(const CsiStream &stream, const PipelineConfig &config);

// Fit on rows [first, first + count) of basis_rows().
PcaBasis fit_pipeline_basis(const CsiStream &stream, const PipelineConfig &config, std::size_t first,
                            std::size_t count);

// Whole-stream batch processing. Output length equals frame count, timestamps
// preserved. Throws GeometryError if the basis does not match the stream.
std::vector<FeatureSample> process_stream(const CsiStream &stream, const PipelineConfig &config,
                                          const PcaBasis &basis);

// Frame-at-a-time equivalent of process_stream. Outputs lag the input by the
// median half-window; flush() emits the tail with the same boundary padding,
// so the concatenated output equals process_stream exactly.
class StreamingPipeline {
  public:
    StreamingPipeline(PipelineConfig config, PcaBasis basis);

    // Appends zero or one feature sample to `out`.
    void push(const CsiFrame &frame, std::vector<FeatureSample> &out);
    void flush(std::vector<FeatureSample> &out);
    void reset();

    const PipelineConfig &config() const { return config_; }
    const PcaBasis &basis() const { return basis_; }
    std::size_t lag() const { return config_.median_window / 2; }

  private:
    struct Channel {
        MedianState median;
        EmaState ema;
        SosState sos;
    };

    void emit(std::uint64_t ts, const double *values, std::vector<FeatureSample> &out);

    PipelineConfig config_;
    PcaBasis basis_;
    // Heap-held so SosState's pointer survives moves of the pipeline.
    std::unique_ptr<SosFilter> filter_;
    std::vector<Channel> channels_;
    std::deque<std::uint64_t> pending_ts_;
    std::vector<double> raw_;
    std::vector<double> stage_;
};

} // namespace vsbutton

#endif
