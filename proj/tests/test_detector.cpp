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
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "table_fixtures.hpp"
#include "vsbutton/calibration.hpp"
#include "vsbutton/detector.hpp"
#include "vsbutton/errors.hpp"

using namespace vsbutton;
namespace fx = vsbutton::fixtures;

namespace {

FeatureSample sample(std::uint64_t t, std::initializer_list<double> v) {
    FeatureSample s;
    s.timestamp_us = t;
    s.values = Vector(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        s.values(i++) = x;
    return s;
}

DetectorState state_with(Vector mean, Eigen::MatrixXd cov) {
    DetectorState s;
    s.mean = std::move(mean);
    s.cov_inverse = cov.inverse();
    s.cov = std::move(cov);
    return s;
}

std::vector<FeatureSample> gaussian(std::size_t n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::vector<FeatureSample> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sample(i, {g(rng), 2.0 * g(rng), 0.5 * g(rng)});
    return out;
}

} // namespace

TEST(Warmup, HandExample) {
    const std::vector<FeatureSample> s = {sample(0, {0, 0}), sample(1, {1, 0}), sample(2, {0, 1}),
                                          sample(3, {1, 1})};
    DetectorConfig c;
    c.warmup_samples = 4;
    const DetectorState st = warmup(s, c);
    EXPECT_DOUBLE_EQ(st.mean(0), 0.5);
    EXPECT_DOUBLE_EQ(st.mean(1), 0.5);
    EXPECT_NEAR(st.cov(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(st.cov(1, 1), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(st.cov(0, 1), 0.0, 1e-15);
    EXPECT_EQ(st.streak, 0u);
    EXPECT_FALSE(st.frozen);
}

TEST(Warmup, TwoPassOracle) {
    const auto s = gaussian(250, 1);
    const DetectorState st = warmup(s, DetectorConfig{});
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto &x : s)
        mean += x.values;
    mean /= 250.0;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto &x : s)
        cov += (x.values - mean) * (x.values - mean).transpose();
    cov /= 249.0;
    EXPECT_LT((st.mean - mean).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((st.cov - cov).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Warmup, Errors) {
    std::vector<FeatureSample> same(250, sample(0, {1, 2, 3}));
    EXPECT_THROW(warmup(same, DetectorConfig{}), DegenerateBaselineError);
    EXPECT_THROW(warmup(gaussian(100, 2), DetectorConfig{}), DegenerateBaselineError);
    DetectorConfig tiny;
    tiny.warmup_samples = 4;
    EXPECT_THROW(validate(tiny, 3), ConfigError);
    DetectorConfig bad;
    bad.alpha = 1.0;
    EXPECT_THROW(validate(bad), ConfigError);
    bad = {};
    bad.threshold_t = 0.0;
    EXPECT_THROW(validate(bad), ConfigError);
    bad = {};
    bad.consecutive_count = 0;
    EXPECT_THROW(validate(bad), ConfigError);
}

TEST(Mahalanobis, Examples) {
    const DetectorState iso = state_with(Vector::Constant(3, 1.0), Eigen::MatrixXd::Identity(3, 3));
    EXPECT_EQ(mahalanobis(iso, Vector::Constant(3, 1.0)), 0.0);
    EXPECT_NEAR(mahalanobis(iso, Vector{{4.0, 5.0, 1.0}}), 5.0, 1e-12);
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 4.0;
    diag(1, 1) = 1.0;
    const DetectorState d = state_with(Vector::Zero(2), diag);
    EXPECT_NEAR(mahalanobis(d, Vector{{2.0, 1.0}}), std::sqrt(2.0), 1e-12);
    EXPECT_THROW(mahalanobis(d, Vector::Zero(3)), GeometryError);
}

TEST(Mahalanobis, InvariantUnderLinearTransform) {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Matrix3d A, B;
        for (int i = 0; i < 9; ++i) {
            A(i / 3, i % 3) = g(rng);
            B(i / 3, i % 3) = g(rng);
        }
        A += 2.0 * Eigen::Matrix3d::Identity();
        const Eigen::Matrix3d S = B * B.transpose() + Eigen::Matrix3d::Identity();
        const Eigen::Vector3d m(g(rng), g(rng), g(rng)), r(g(rng), g(rng), g(rng));
        const double base = mahalanobis(state_with(m, S), Vector(r));
        const double moved = mahalanobis(state_with(A * m, A * S * A.transpose()), Vector(A * r));
        EXPECT_NEAR(base, moved, 1e-6 * std::max(1.0, base));
    }
}

TEST(Step, MeanUpdateExample) {
    DetectorState st = state_with(Vector::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    DetectorConfig c;
    const StepResult r = step(st, sample(0, {1.0}), c);
    EXPECT_EQ(r.verdict, Verdict::Normal);
    EXPECT_NEAR(st.mean(0), 0.02, 1e-15);
}

TEST(Step, MeanIsFixedPoint) {
    DetectorState st = state_with(Vector{{0.3, -1.0}}, Eigen::MatrixXd::Identity(2, 2));
    const StepResult r = step(st, sample(0, {0.3, -1.0}), DetectorConfig{});
    EXPECT_EQ(r.verdict, Verdict::Normal);
    EXPECT_EQ(st.streak, 0u);
    EXPECT_EQ(st.mean, (Vector{{0.3, -1.0}}));
}

TEST(Step, TenAnomaliesGiveOneEvent) {
    DetectorState st = warmup(gaussian(250, 4), DetectorConfig{});
    DetectorConfig c;
    int events = 0;
    for (int i = 0; i < 25; ++i) {
        const StepResult r = step(st, sample(1000 + i, {50.0, 50.0, 50.0}), c);
        EXPECT_EQ(r.verdict, Verdict::Anomaly);
        if (r.event) {
            ++events;
            EXPECT_EQ(i, 9);
            EXPECT_EQ(r.event->timestamp_us, 1009u);
            EXPECT_GT(r.event->peak_distance, c.threshold_t);
        }
    }
    EXPECT_EQ(events, 1);
}

TEST(Step, AnomaliesFreezeBaselineBitExactly) {
    DetectorConfig c;
    c.cov_alpha = 0.98;
    DetectorState st = warmup(gaussian(250, 5), c);
    const Vector mean = st.mean;
    const Eigen::MatrixXd cov = st.cov;
    for (int i = 0; i < 100; ++i)
        step(st, sample(i, {40.0 + i, -30.0, 25.0}), c);
    EXPECT_TRUE(st.frozen);
    EXPECT_EQ(st.mean, mean);
    EXPECT_EQ(st.cov, cov);
}

TEST(Step, NormalUpdateIsConvexAndKeepsCovSpd) {
    DetectorConfig c;
    c.cov_alpha = 0.9;
    c.threshold_t = 1e9;
    DetectorState st = warmup(gaussian(250, 6), c);
    for (const FeatureSample &r : gaussian(500, 7)) {
        const Vector before = st.mean;
        step(st, r, c);
        for (Eigen::Index i = 0; i < 3; ++i) {
            EXPECT_GE(st.mean(i), std::min(before(i), r.values(i)) - 1e-12);
            EXPECT_LE(st.mean(i), std::max(before(i), r.values(i)) + 1e-12);
        }
        EXPECT_LT((st.cov - st.cov.transpose()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(st.cov).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Step, ShortRunsNeverFire) {
    std::mt19937 rng(8);
    for (std::size_t c = 1; c <= 10; ++c) {
        DetectorConfig cfg;
        cfg.consecutive_count = c;
        DetectorState st = state_with(Vector::Zero(1), Eigen::MatrixXd::Identity(1, 1));
        std::size_t run = 0;
        for (int i = 0; i < 2000; ++i) {
            const bool anomaly = run + 1 < c && rng() % 2 == 0;
            run = anomaly ? run + 1 : 0;
            EXPECT_FALSE(step(st, sample(i, {anomaly ? 9.0 : 0.0}), cfg).event.has_value());
        }
    }
}

TEST(SessionStats, MaximaPerLabelAndCoverage) {
    DetectorState st = state_with(Vector::Zero(1), Eigen::MatrixXd::Identity(1, 1));
    const LabelSet labels = {{0, 3, {SessionKind::NoMotion, Motion::None, "q"}},
                             {3, 6, {SessionKind::IndoorMotion, Motion::WaveHand, "A"}}};
    const std::vector<FeatureSample> s = {sample(0, {0.5}), sample(1, {-1.5}), sample(2, {0.0}),
                                          sample(3, {7.0}), sample(4, {9.0}),  sample(5, {8.0})};
    const auto stats = session_stats(s, labels, st, DetectorConfig{});
    ASSERT_EQ(stats.size(), 2u);
    EXPECT_NEAR(stats[0].max_distance, 1.51, 1e-12);
    EXPECT_EQ(stats[0].samples, 3u);
    EXPECT_GT(stats[1].max_distance, 8.9);
    EXPECT_EQ(stats[1].label.motion, Motion::WaveHand);
    const std::vector<FeatureSample> outside = {sample(10, {0.0})};
    EXPECT_THROW(session_stats(outside, labels, st, DetectorConfig{}), LabelCoverageError);
}

TEST(Calibration, SquareRoomSecondLayout) {
    const auto s = fx::sessions_from(fx::kSquareRoomConfig2);
    const CalibrationResult r = calibrate_threshold(s.indoor, s.outdoor);
    ASSERT_TRUE(r.separable);
    EXPECT_NEAR(r.dmin_in, 0.312, 1e-15);
    EXPECT_NEAR(r.dmax_out, 0.241, 1e-15);
    EXPECT_NEAR(r.threshold_t, 0.2765, 1e-12);
    EXPECT_EQ(r.weakest_indoor.label.location_tag, "A");
    EXPECT_EQ(r.weakest_indoor.label.motion, Motion::WaveHand);
    EXPECT_EQ(r.strongest_outdoor.label.location_tag, "M'");
    EXPECT_EQ(r.strongest_outdoor.label.motion, Motion::Jump);
    for (const auto &x : s.indoor)
        EXPECT_GT(x.max_distance, r.threshold_t);
    for (const auto &x : s.outdoor)
        EXPECT_LT(x.max_distance, r.threshold_t);
    for (const auto &x : s.nothing)
        EXPECT_LT(x.max_distance, r.threshold_t);
    EXPECT_TRUE(r.offending_indoor.empty());
}

TEST(Calibration, RectangularRoom) {
    const auto s = fx::sessions_from(fx::kRectangleRoom);
    const CalibrationResult r = calibrate_threshold(s.indoor, s.outdoor);
    ASSERT_TRUE(r.separable);
    EXPECT_NEAR(r.threshold_t, 0.0945, 1e-12);
    EXPECT_NEAR(r.margin, 0.105, 1e-12);
}

TEST(Calibration, SquareRoomFirstLayoutIsNotSeparable) {
    const auto s = fx::sessions_from(fx::kSquareRoomConfig1);
    const CalibrationResult r = calibrate_threshold(s.indoor, s.outdoor);
    EXPECT_FALSE(r.separable);
    EXPECT_NEAR(r.dmin_in, 0.191, 1e-15);
    EXPECT_EQ(r.weakest_indoor.label.location_tag, "D");
    EXPECT_NEAR(r.dmax_out, 0.373, 1e-15);
    std::vector<std::string> off;
    for (const auto &x : r.offending_outdoor)
        off.push_back(to_string(x.label.motion) + "@" + x.label.location_tag);
    EXPECT_NE(std::find(off.begin(), off.end(), "SIT_DOWN_STAND_UP@M'"), off.end());
    EXPECT_NE(std::find(off.begin(), off.end(), "JUMP@M'"), off.end());
    EXPECT_FALSE(r.offending_indoor.empty());
}

TEST(Calibration, SeparatesWheneverSeparable) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<SessionStats> in, out;
        for (int i = 0; i < 6; ++i) {
            in.push_back({{SessionKind::IndoorMotion, Motion::Jump, "in"}, u(rng), 1});
            out.push_back({{SessionKind::OutdoorMotion, Motion::Jump, "out"}, u(rng), 1});
        }
        const CalibrationResult r = calibrate_threshold(in, out);
        if (!r.separable)
            continue;
        for (const auto &x : in)
            EXPECT_GT(x.max_distance, r.threshold_t);
        for (const auto &x : out)
            EXPECT_LT(x.max_distance, r.threshold_t);
    }
}

TEST(Calibration, InputErrors) {
    const auto s = fx::sessions_from(fx::kRectangleRoom);
    EXPECT_THROW(calibrate_threshold({}, s.outdoor), ConfigError);
    EXPECT_THROW(calibrate_threshold(s.indoor, {}), ConfigError);
    EXPECT_THROW(calibrate_threshold(s.outdoor, s.outdoor), ConfigError);
    EXPECT_THROW(calibrate_threshold(s.indoor, s.nothing), ConfigError);
}

TEST(Calibration, ReportListsEverySession) {
    const auto s = fx::sessions_from(fx::kSquareRoomConfig2);
    const CalibrationResult r = calibrate_threshold(s.indoor, s.outdoor);
    std::stringstream out;
    write_calibration_report(r, s.indoor, s.outdoor, s.nothing, out);
    const std::string text = out.str();
    EXPECT_NE(text.find("threshold_t = 0.2765"), std::string::npos);
    std::size_t sessions = 0;
    for (std::size_t at = text.find("session ="); at != std::string::npos; at = text.find("session =", at + 1))
        ++sessions;
    EXPECT_EQ(sessions, s.indoor.size() + s.outdoor.size() + s.nothing.size());
}
