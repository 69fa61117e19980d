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

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "vsbutton/detector.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

void validate(const DetectorConfig &c, std::size_t dimension) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0))
        throw ConfigError(fmt::format("alpha must lie in (0, 1), got {}", c.alpha));
    if (!(c.cov_alpha > 0.0 && c.cov_alpha <= 1.0))
        throw ConfigError(fmt::format("cov_alpha must lie in (0, 1], got {}", c.cov_alpha));
    if (!(c.threshold_t > 0.0) || !std::isfinite(c.threshold_t))
        throw ConfigError("threshold_t must be positive");
    if (c.consecutive_count < 1)
        throw ConfigError("consecutive_count must be >= 1");
    if (dimension > 0 && c.warmup_samples < dimension + 2)
        throw ConfigError(fmt::format("warmup_samples must be >= d + 2 = {}", dimension + 2));
}

namespace {

// Inverse of an SPD matrix; false if the factorisation fails.
bool spd_inverse(const Eigen::MatrixXd &m, Eigen::MatrixXd &inv) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        return false;
    inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return inv.allFinite();
}

} // namespace

DetectorState warmup(std::span<const FeatureSample> samples, const DetectorConfig &config) {
    if (samples.empty())
        throw DegenerateBaselineError("no warm-up samples");
    const Eigen::Index d = samples.front().values.size();
    validate(config, std::size_t(d));
    if (samples.size() < config.warmup_samples)
        throw DegenerateBaselineError(
            fmt::format("warm-up needs {} samples, got {}", config.warmup_samples, samples.size()));

    const auto window = samples.first(config.warmup_samples);
    DetectorState state;
    state.mean = Vector::Zero(d);
    for (const FeatureSample &s : window) {
        if (s.values.size() != d)
            throw GeometryError("warm-up samples differ in dimension");
        state.mean += s.values;
    }
    const double k = double(window.size());
    state.mean /= k;
    state.cov = Eigen::MatrixXd::Zero(d, d);
    for (const FeatureSample &s : window) {
        const Vector e = s.values - state.mean;
        state.cov.noalias() += e * e.transpose();
    }
    state.cov /= (k - 1.0);

    const double trace = state.cov.trace();
    if (!(trace > 0.0) || !std::isfinite(trace))
        throw DegenerateBaselineError("warm-up covariance is zero");
    const double eps = 1e-9 * trace / double(d);
    const Eigen::MatrixXd regularised = state.cov + eps * Eigen::MatrixXd::Identity(d, d);
    if (!spd_inverse(regularised, state.cov_inverse))
        throw DegenerateBaselineError("warm-up covariance is singular after regularisation");
    state.samples_seen = window.size();
    return state;
}

double mahalanobis(const DetectorState &state, const Vector &r) {
    if (r.size() != state.dimension())
        throw GeometryError(fmt::format("sample has dimension {}, detector expects {}", r.size(), state.dimension()));
    const Vector e = r - state.mean;
    return std::sqrt(std::max(0.0, e.dot(state.cov_inverse * e)));
}

StepResult step(DetectorState &state, const FeatureSample &r, const DetectorConfig &config) {
    StepResult result;
    result.distance = mahalanobis(state, r.values);
    ++state.samples_seen;

    if (result.distance > config.threshold_t) {
        result.verdict = Verdict::Anomaly;
        state.streak_peak = state.streak == 0 ? result.distance : std::max(state.streak_peak, result.distance);
        ++state.streak;
        state.frozen = true;
        if (state.streak == config.consecutive_count)
            result.event = MotionEvent{r.timestamp_us, state.streak_peak};
        return result;
    }

    state.streak = 0;
    state.frozen = false;
    state.streak_peak = 0.0;
    state.mean = config.alpha * state.mean + (1.0 - config.alpha) * r.values;
    if (config.cov_alpha < 1.0) {
        const Vector e = r.values - state.mean;
        Eigen::MatrixXd next = config.cov_alpha * state.cov + (1.0 - config.cov_alpha) * (e * e.transpose());
        Eigen::MatrixXd inv;
        if (spd_inverse(next, inv)) {
            state.cov = std::move(next);
            state.cov_inverse = std::move(inv);
        }
    }
    return result;
}

std::vector<SessionStats> session_stats(std::span<const FeatureSample> samples, const LabelSet &labels,
                                        DetectorState &state, const DetectorConfig &config) {
    std::vector<SessionStats> stats(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        stats[i].label = labels[i].label;

    std::size_t cursor = 0;
    for (const FeatureSample &s : samples) {
        // Labels are normally sorted and contiguous; fall back to a scan otherwise.
        if (cursor >= labels.size() || !labels[cursor].contains(s.timestamp_us)) {
            const std::ptrdiff_t found = find_label(labels, s.timestamp_us);
            if (found < 0)
                throw LabelCoverageError(fmt::format("sample at {} us is not covered by any label", s.timestamp_us));
            cursor = std::size_t(found);
        }
        const StepResult res = step(state, s, config);
        SessionStats &st = stats[cursor];
        st.max_distance = std::max(st.max_distance, res.distance);
        ++st.samples;
    }
    return stats;
}

} // namespace vsbutton
