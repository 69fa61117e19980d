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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vsbutton/config.hpp"
#include "vsbutton/errors.hpp"

namespace vsbutton {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    return out;
}

std::size_t to_count(const std::string &key, const std::string &v) {
    const double d = to_double(key, v);
    if (d < 0.0 || d != double(std::size_t(d)))
        throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, v));
    return std::size_t(d);
}

std::vector<int> to_index_list(const std::string &key, const std::string &v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(int(to_count(key, trim(item))));
    return out;
}

} // namespace

Profile parse_profile(std::istream &in, const std::string &base_dir) {
    Profile p;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));

        if (key == "median_window")
            p.pipeline.median_window = to_count(key, v);
        else if (key == "ema_window")
            p.pipeline.ema_window = to_count(key, v);
        else if (key == "butterworth_order")
            p.pipeline.butterworth_order = int(to_count(key, v));
        else if (key == "butterworth_cutoff_hz")
            p.pipeline.butterworth_cutoff_hz = to_double(key, v);
        else if (key == "sample_rate_hz")
            p.pipeline.sample_rate_hz = to_double(key, v);
        else if (key == "pca_keep")
            p.pipeline.pca_keep = to_index_list(key, v);
        else if (key == "pipeline_order") {
            if (v == "filter-first")
                p.pipeline.order = PipelineOrder::FilterFirst;
            else if (v == "pca-first")
                p.pipeline.order = PipelineOrder::PcaFirst;
            else
                throw ConfigError(fmt::format("pipeline_order: '{}' is not filter-first or pca-first", v));
        } else if (key == "settle_samples")
            p.pipeline.settle_samples = to_count(key, v);
        else if (key == "pca_basis") {
            std::filesystem::path path(v);
            if (path.is_relative() && !base_dir.empty())
                path = std::filesystem::path(base_dir) / path;
            p.pca_basis = path.string();
        } else if (key == "alpha")
            p.detector.alpha = to_double(key, v);
        else if (key == "cov_alpha")
            p.detector.cov_alpha = to_double(key, v);
        else if (key == "threshold_t") {
            p.threshold_t = to_double(key, v);
            p.detector.threshold_t = *p.threshold_t;
        } else if (key == "probe_threshold")
            p.probe_threshold = to_double(key, v);
        else if (key == "consecutive_count")
            p.detector.consecutive_count = to_count(key, v);
        else if (key == "warmup_samples")
            p.detector.warmup_samples = to_count(key, v);
        else if (key == "probe_rate_hz")
            p.daemon.probe_rate_hz = to_double(key, v);
        else if (key == "probe_payload_bytes")
            p.daemon.probe_payload_bytes = to_count(key, v);
        else if (key == "enable_duration_s")
            p.daemon.enable_duration_s = to_double(key, v);
        else if (key == "actuator_command")
            p.daemon.actuator_command = v;
        else if (key == "trace_out")
            p.daemon.trace_out = v;
        else if (key == "stall_timeout_s")
            p.daemon.stall_timeout_s = to_double(key, v);
        else if (key == "detection_grace_s")
            p.daemon.detection_grace_s = to_double(key, v);
        else
            throw ConfigError(fmt::format("config line {}: unknown key '{}'", lineno, key));
    }
    if (!p.threshold_t)
        p.detector.threshold_t = p.probe_threshold;
    validate(p);
    return p;
}

Profile load_profile(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config {}", path));
    return parse_profile(in, std::filesystem::path(path).parent_path().string());
}

void write_profile(const Profile &p, std::ostream &out) {
    std::string keep;
    for (std::size_t i = 0; i < p.pipeline.pca_keep.size(); ++i)
        keep += (i ? "," : "") + std::to_string(p.pipeline.pca_keep[i]);
    fmt::print(out, "# pipeline\n");
    fmt::print(out, "median_window = {}\nema_window = {}\nbutterworth_order = {}\nbutterworth_cutoff_hz = {}\n",
               p.pipeline.median_window, p.pipeline.ema_window, p.pipeline.butterworth_order,
               p.pipeline.butterworth_cutoff_hz);
    fmt::print(out, "sample_rate_hz = {}\npca_keep = {}\npipeline_order = {}\nsettle_samples = {}\n",
               p.pipeline.sample_rate_hz, keep,
               p.pipeline.order == PipelineOrder::FilterFirst ? "filter-first" : "pca-first",
               p.pipeline.settle_samples);
    if (!p.pca_basis.empty())
        fmt::print(out, "pca_basis = {}\n", p.pca_basis);
    fmt::print(out, "# detector\n");
    fmt::print(out, "alpha = {}\ncov_alpha = {}\nconsecutive_count = {}\nwarmup_samples = {}\nprobe_threshold = {}\n",
               p.detector.alpha, p.detector.cov_alpha, p.detector.consecutive_count, p.detector.warmup_samples,
               p.probe_threshold);
    if (p.threshold_t)
        fmt::print(out, "threshold_t = {:.17g}\n", *p.threshold_t);
    fmt::print(out, "# daemon\n");
    fmt::print(out, "probe_rate_hz = {}\nprobe_payload_bytes = {}\nenable_duration_s = {}\nstall_timeout_s = {}\n",
               p.daemon.probe_rate_hz, p.daemon.probe_payload_bytes, p.daemon.enable_duration_s,
               p.daemon.stall_timeout_s);
    fmt::print(out, "detection_grace_s = {}\n", p.daemon.detection_grace_s);
    if (!p.daemon.actuator_command.empty())
        fmt::print(out, "actuator_command = {}\n", p.daemon.actuator_command);
    if (!p.daemon.trace_out.empty())
        fmt::print(out, "trace_out = {}\n", p.daemon.trace_out);
}

void set_config_key(const std::string &path, const std::string &key, const std::string &value) {
    std::vector<std::string> lines;
    {
        std::ifstream in(path);
        std::string line;
        while (in && std::getline(in, line))
            lines.push_back(line);
    }
    bool replaced = false;
    for (std::string &line : lines) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        if (eq != std::string::npos && trim(t.substr(0, eq)) == key) {
            line = key + " = " + value;
            replaced = true;
        }
    }
    if (!replaced)
        lines.push_back(key + " = " + value);
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError(fmt::format("cannot write config {}", path), 0);
    for (const std::string &line : lines)
        out << line << '\n';
}

void validate(const Profile &p) {
    validate(p.pipeline);
    validate(p.detector, p.pipeline.pca_keep.size());
    validate(p.daemon);
    if (!(p.probe_threshold > 0.0))
        throw ConfigError("probe_threshold must be positive");
}

} // namespace vsbutton
