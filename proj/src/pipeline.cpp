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
#include <fmt/format.h>

#include "vsbutton/errors.hpp"
#include "vsbutton/pipeline.hpp"

namespace vsbutton {

void validate(const PipelineConfig &c) {
    if (c.median_window < 3 || c.median_window % 2 == 0)
        throw ConfigError(fmt::format("median_window must be odd and >= 3, got {}", c.median_window));
    if (c.ema_window < 1)
        throw ConfigError("ema_window must be >= 1");
    if (c.butterworth_order < 1)
        throw ConfigError("butterworth_order must be >= 1");
    if (!(c.sample_rate_hz > 0.0))
        throw ConfigError("sample_rate_hz must be positive");
    if (!(c.butterworth_cutoff_hz > 0.0 && c.butterworth_cutoff_hz < c.sample_rate_hz / 2.0))
        throw ConfigError(fmt::format("butterworth_cutoff_hz {} must lie in (0, {})", c.butterworth_cutoff_hz,
                                      c.sample_rate_hz / 2.0));
    if (c.pca_keep.empty())
        throw ConfigError("pca_keep is empty");
    for (std::size_t i = 0; i < c.pca_keep.size(); ++i) {
        if (c.pca_keep[i] < 1)
            throw ConfigError("pca_keep indices are 1-based");
        for (std::size_t j = 0; j < i; ++j)
            if (c.pca_keep[j] == c.pca_keep[i])
                throw ConfigError("pca_keep indices must be distinct");
    }
}

namespace {

std::vector<double> filter_series(std::span<const double> x, const PipelineConfig &c, const SosFilter &sos) {
    std::vector<double> y = median_filter(x, c.median_window);
    y = ema_filter(y, c.ema_window);
    return butterworth_apply(sos, y);
}

Matrix filter_matrix(const Matrix &in, const PipelineConfig &c) {
    const SosFilter sos = butterworth_design(c.butterworth_order, c.butterworth_cutoff_hz, c.sample_rate_hz);
    Matrix out(in.rows(), in.cols());
    std::vector<double> col(std::size_t(in.rows()));
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
        for (Eigen::Index r = 0; r < in.rows(); ++r)
            col[std::size_t(r)] = in(r, j);
        const std::vector<double> y = filter_series(col, c, sos);
        for (Eigen::Index r = 0; r < in.rows(); ++r)
            out(r, j) = y[std::size_t(r)];
    }
    return out;
}

void check_geometry(const CsiStream &stream, const PcaBasis &basis) {
    if (Eigen::Index(stream.geometry.streams()) != basis.dimension())
        throw GeometryError(fmt::format("stream has {} CSI streams, basis was fitted on {}", stream.geometry.streams(),
                                        basis.dimension()));
}

} // namespace

Matrix filter_columns(const Matrix &amplitudes, const PipelineConfig &config) {
    validate(config);
    return filter_matrix(amplitudes, config);
}

Matrix basis_rows(const CsiStream &stream, const PipelineConfig &config) {
    validate(config);
    const Matrix amps = csi_amplitude_streams(stream);
    return config.order == PipelineOrder::FilterFirst ? filter_matrix(amps, config) : amps;
}

PcaBasis fit_pipeline_basis(const CsiStream &stream, const PipelineConfig &config, std::size_t first,
                            std::size_t count) {
    const Matrix rows = basis_rows(stream, config);
    if (first + count > std::size_t(rows.rows()))
        throw DegenerateDataError(fmt::format("basis window [{}, {}) exceeds the {} available frames", first,
                                              first + count, rows.rows()));
    PcaBasis basis = pca_fit(rows.middleRows(Eigen::Index(first), Eigen::Index(count)));
    check_keep(basis, config.pca_keep);
    return basis;
}

std::vector<FeatureSample> process_stream(const CsiStream &stream, const PipelineConfig &config,
                                          const PcaBasis &basis) {
    validate(config);
    check_geometry(stream, basis);
    check_keep(basis, config.pca_keep);
    const Matrix amps = csi_amplitude_streams(stream);

    std::vector<FeatureSample> out(stream.frames.size());
    if (config.order == PipelineOrder::FilterFirst) {
        const Matrix filtered = filter_matrix(amps, config);
        for (Eigen::Index r = 0; r < filtered.rows(); ++r) {
            out[std::size_t(r)].timestamp_us = stream.frames[std::size_t(r)].timestamp_us;
            out[std::size_t(r)].values = pca_project(
                basis, std::span<const double>(filtered.row(r).data(), std::size_t(filtered.cols())), config.pca_keep);
        }
    } else {
        Matrix projected(amps.rows(), Eigen::Index(config.pca_keep.size()));
        for (Eigen::Index r = 0; r < amps.rows(); ++r)
            projected.row(r) =
                pca_project(basis, std::span<const double>(amps.row(r).data(), std::size_t(amps.cols())),
                            config.pca_keep)
                    .transpose();
        const Matrix filtered = filter_matrix(projected, config);
        for (Eigen::Index r = 0; r < filtered.rows(); ++r) {
            out[std::size_t(r)].timestamp_us = stream.frames[std::size_t(r)].timestamp_us;
            out[std::size_t(r)].values = filtered.row(r).transpose();
        }
    }
    return out;
}

StreamingPipeline::StreamingPipeline(PipelineConfig config, PcaBasis basis)
    : config_(std::move(config)), basis_(std::move(basis)) {
    validate(config_);
    check_keep(basis_, config_.pca_keep);
    filter_ = std::make_unique<SosFilter>(
        butterworth_design(config_.butterworth_order, config_.butterworth_cutoff_hz, config_.sample_rate_hz));
    const std::size_t n = config_.order == PipelineOrder::FilterFirst ? std::size_t(basis_.dimension())
                                                                      : config_.pca_keep.size();
    channels_.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        channels_.push_back({MedianState(config_.median_window), EmaState(config_.ema_window), SosState(filter_.get())});
    raw_.resize(std::size_t(basis_.dimension()));
    stage_.resize(n);
}

void StreamingPipeline::emit(std::uint64_t ts, const double *values, std::vector<FeatureSample> &out) {
    FeatureSample s;
    s.timestamp_us = ts;
    if (config_.order == PipelineOrder::FilterFirst) {
        s.values = pca_project(basis_, std::span<const double>(values, channels_.size()), config_.pca_keep);
    } else {
        s.values = Eigen::Map<const Eigen::VectorXd>(values, Eigen::Index(channels_.size()));
    }
    out.push_back(std::move(s));
}

void StreamingPipeline::push(const CsiFrame &frame, std::vector<FeatureSample> &out) {
    if (Eigen::Index(frame.h.size()) != basis_.dimension())
        throw GeometryError(
            fmt::format("frame has {} CSI streams, basis was fitted on {}", frame.h.size(), basis_.dimension()));
    frame_amplitudes(frame, raw_.data());
    pending_ts_.push_back(frame.timestamp_us);

    const double *input = raw_.data();
    Vector projected;
    if (config_.order == PipelineOrder::PcaFirst) {
        projected = pca_project(basis_, raw_, config_.pca_keep);
        input = projected.data();
    }
    bool ready = false;
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        double m = 0.0;
        ready = channels_[i].median.push(input[i], m);
        if (ready)
            stage_[i] = channels_[i].sos.push(channels_[i].ema.push(m));
    }
    if (ready) {
        emit(pending_ts_.front(), stage_.data(), out);
        pending_ts_.pop_front();
    }
}

void StreamingPipeline::flush(std::vector<FeatureSample> &out) {
    std::vector<std::vector<double>> tails(channels_.size());
    for (std::size_t i = 0; i < channels_.size(); ++i)
        tails[i] = channels_[i].median.flush();
    const std::size_t n = tails.empty() ? 0 : tails[0].size();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < channels_.size(); ++i)
            stage_[i] = channels_[i].sos.push(channels_[i].ema.push(tails[i][k]));
        emit(pending_ts_.front(), stage_.data(), out);
        pending_ts_.pop_front();
    }
}

void StreamingPipeline::reset() {
    for (Channel &c : channels_) {
        c.median.reset();
        c.ema.reset();
        c.sos.reset();
    }
    pending_ts_.clear();
}

} // namespace vsbutton
