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
#ifndef VSBUTTON_CONFIG_HPP
#define VSBUTTON_CONFIG_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "vsbutton/detector.hpp"
#include "vsbutton/gate.hpp"
#include "vsbutton/pipeline.hpp"

namespace vsbutton {

// Everything a run needs, as read from a `key = value` config file.
struct Profile {
    PipelineConfig pipeline;
    DetectorConfig detector;
    DaemonConfig daemon;
    // Set once calibration has run; detector.threshold_t mirrors it.
    std::optional<double> threshold_t;
    // Threshold used while measuring calibration sessions.
    double probe_threshold = 5.0;
    // Persisted PCA basis, resolved relative to the config file.
    std::string pca_basis;
};

// Unknown keys and malformed values throw ConfigError. `base_dir` resolves
// relative paths (pca_basis).
Profile parse_profile(std::istream &in, const std::string &base_dir = {});
Profile load_profile(const std::string &path);
void write_profile(const Profile &profile, std::ostream &out);

// Rewrites one key in a config file, keeping every other line; appends the
// key if absent and creates the file if missing.
void set_config_key(const std::string &path, const std::string &key, const std::string &value);

void validate(const Profile &profile);

} // namespace vsbutton

#endif
