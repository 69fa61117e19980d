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
#ifndef VSBUTTON_DETECTOR_HPP
#define VSBUTTON_DETECTOR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vsbutton/csi.hpp"
#include "vsbutton/pipeline.hpp"

namespace vsbutton {

struct DetectorConfig {
    double alpha = 0.98;            // forgetting factor of the running mean
    double cov_alpha = 1.0;         // forgetting factor of the covariance; 1 keeps the warm-up estimate
    double threshold_t = 5.0;       // Mahalanobis distance above which a sample is anomalous
    std::size_t consecutive_count = 10;
    std::size_t warmup_samples = 250;
};

// Throws ConfigError. `dimension` enables the warmup_samples >= d + 2 check.
void validate(const DetectorConfig &config, std::size_t dimension = 0);

struct MotionEvent {
    std::uint64_t timestamp_us = 0;
    double peak_distance = 0.0;

    bool operator==(const MotionEvent &) const = default;
};

struct DetectorState {
    Vector mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd cov_inverse;
    std::uint64_t samples_seen = 0;
    std::size_t streak = 0;
    bool frozen = false;
    double streak_peak = 0.0;

    Eigen::Index dimension() const { return mean.size(); }
};

enum class Verdict { Normal, Anomaly };

struct StepResult {
    Verdict verdict = Verdict::Normal;
    double distance = 0.0;
    std::optional<MotionEvent> event;
};

// Batch mean and (k-1)-normalised covariance of the warm-up samples; the
// inverse is taken of cov + eps*I with eps = 1e-9 * trace / d.
// Throws DegenerateBaselineError when the covariance is singular.
DetectorState warmup(std::span<const FeatureSample> samples, const DetectorConfig &config);

// sqrt((r - m)^T S^-1 (r - m)). Throws GeometryError on a dimension mismatch.
double mahalanobis(const DetectorState &state, const Vector &r);
inline double mahalanobis(const DetectorState &state, const FeatureSample &r) { return mahalanobis(state, r.values); }

// Scores r against the current baseline. Normal samples move the mean by
// m <- a*m + (1-a)*r and, when cov_alpha < 1, the covariance by
// S <- c*S + (1-c)(r - m)(r - m)^T. Anomalies leave the baseline untouched and
// extend the streak; a MotionEvent is reported when the streak reaches
// consecutive_count.
StepResult step(DetectorState &state, const FeatureSample &r, const DetectorConfig &config);

struct SessionStats {
    SessionLabel label;
    double max_distance = 0.0;
    std::size_t samples = 0;
};

// One entry per label range, in label order: the largest distance seen while
// stepping through the range. `state` is advanced in place.
// Throws LabelCoverageError if a sample falls outside every range.
std::vector<SessionStats> session_stats(std::span<const FeatureSample> samples, const LabelSet &labels,
                                        DetectorState &state, const DetectorConfig &config);

} // namespace vsbutton

#endif
