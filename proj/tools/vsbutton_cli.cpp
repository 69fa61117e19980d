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
#include <atomic>
#include <csignal>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vsbutton/calibration.hpp"
#include "vsbutton/channel.hpp"
#include "vsbutton/config.hpp"
#include "vsbutton/errors.hpp"
#include "vsbutton/live.hpp"
#include "vsbutton/replay.hpp"

namespace fs = std::filesystem;
using namespace vsbutton;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

// foo.csit -> foo.labels; anything else gets ".labels" appended.
std::string sidecar_path(const std::string &trace) {
    fs::path p(trace);
    if (p.extension() == ".csit")
        return p.replace_extension(".labels").string();
    return trace + ".labels";
}

std::optional<PcaBasis> profile_basis(const Profile &profile) {
    if (profile.pca_basis.empty())
        return std::nullopt;
    return read_basis_file(profile.pca_basis);
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw IoError(fmt::format("cannot open {} for writing", path), 0);
    return out;
}

struct SynthArgs {
    std::string scenario;
    double duration_s = 60.0;
    std::uint64_t seed = 0;
    std::string out;
    int bursts = 0;
    double burst_s = 3.0;
    double gap_s = 12.0;
    double lead_in_s = 6.0;
    double rate_hz = 50.0;
};

int cmd_synth(const SynthArgs &a) {
    Scenario sc = scenario_by_name(a.scenario);
    if (a.seed != 0)
        sc.model.seed = a.seed;
    SynthResult r = a.bursts > 0
                        ? synthesize_schedule(sc.model,
                                              burst_schedule(sc.label, a.bursts, a.burst_s, a.gap_s, a.lead_in_s),
                                              a.rate_hz)
                        : synthesize(sc.model, sc.label, a.duration_s, a.rate_hz, a.lead_in_s);
    write_trace_file(r.stream, a.out);
    const std::string labels = sidecar_path(a.out);
    write_labels_file(r.labels, labels);
    fmt::print("wrote {} ({} frames) and {}\n", a.out, r.stream.frames.size(), labels);
    return 0;
}

struct CalibrateArgs {
    std::vector<std::string> indoor;
    std::vector<std::string> outdoor;
    std::string config;
    std::string report;
    std::string basis_out;
    std::string baseline;
};

int cmd_calibrate(const CalibrateArgs &a) {
    Profile profile = load_profile(a.config);
    DetectorConfig probe = profile.detector;
    probe.threshold_t = profile.probe_threshold;

    // Fitting on a trace that is also scored biases that trace's distances low.
    if (a.baseline.empty())
        fmt::print(stderr, "no --baseline given; fitting the basis on {}\n", a.indoor.front());
    const CsiStream reference = read_trace_file(a.baseline.empty() ? a.indoor.front() : a.baseline);
    const PcaBasis basis = fit_warmup_basis(reference, profile.pipeline, probe);

    std::vector<SessionStats> indoor, outdoor, quiet;
    auto score = [&](const std::string &path) {
        const CsiStream trace = read_trace_file(path);
        const LabelSet labels = read_labels_file(sidecar_path(path));
        for (SessionStats &s : score_trace(trace, labels, profile.pipeline, basis, probe)) {
            switch (s.label.kind) {
            case SessionKind::IndoorMotion:
                indoor.push_back(std::move(s));
                break;
            case SessionKind::OutdoorMotion:
                outdoor.push_back(std::move(s));
                break;
            case SessionKind::NoMotion:
                quiet.push_back(std::move(s));
                break;
            }
        }
    };
    for (const auto &p : a.indoor)
        score(p);
    for (const auto &p : a.outdoor)
        score(p);

    const CalibrationResult result = calibrate_threshold(indoor, outdoor);
    if (a.report.empty()) {
        write_calibration_report(result, indoor, outdoor, quiet, std::cout);
    } else {
        auto out = open_out(a.report);
        write_calibration_report(result, indoor, outdoor, quiet, out);
    }
    if (!result.separable) {
        fmt::print(stderr, "indoor and outdoor sessions overlap; config left unchanged\n");
        return 2;
    }

    const std::string basis_path =
        a.basis_out.empty() ? fs::path(a.config).replace_extension(".basis").string() : a.basis_out;
    write_basis_file(basis, basis_path);
    set_config_key(a.config, "threshold_t", fmt::format("{:.17g}", result.threshold_t));
    set_config_key(a.config, "pca_basis", fs::absolute(basis_path).string());
    fmt::print(stderr, "threshold_t = {:.6g} written to {}\n", result.threshold_t, a.config);
    return 0;
}

struct ReplayArgs {
    std::string trace;
    std::string labels;
    std::string config;
    std::string log;
    std::string summary;
};

int cmd_replay(const ReplayArgs &a) {
    const Profile profile = load_profile(a.config);
    const CsiStream trace = read_trace_file(a.trace);
    const LabelSet labels = read_labels_file(a.labels.empty() ? sidecar_path(a.trace) : a.labels);
    const ReplayResult result = run_replay(trace, labels, profile, profile_basis(profile));
    if (a.log.empty()) {
        result.log.write(std::cout);
    } else {
        auto out = open_out(a.log);
        result.log.write(out);
    }
    if (a.summary.empty()) {
        write_summary(result, a.log.empty() ? std::cerr : std::cout);
    } else {
        auto out = open_out(a.summary);
        write_summary(result, out);
    }
    return 0;
}

struct RunArgs {
    std::string config;
    std::string source = "synthetic";
    std::string actuator;
    std::string trace;
    std::string scenario = "indoor-wave";
    int bursts = 20;
    double burst_s = 3.0;
    double gap_s = 12.0;
    double duration_s = 0.0;
    std::uint64_t max_probes = 0;
    bool fast = false;
    std::string log;
};

int cmd_run(const RunArgs &a) {
    Profile profile = load_profile(a.config);
    if (!a.actuator.empty())
        profile.daemon.actuator_command = a.actuator;

    std::unique_ptr<CsiSource> source;
    if (a.source == "replay-loop") {
        if (a.trace.empty())
            throw ConfigError("--source replay-loop needs --trace");
        source = std::make_unique<ReplayLoopSource>(read_trace_file(a.trace));
    } else {
        const Scenario sc = scenario_by_name(a.scenario);
        source = std::make_unique<SyntheticLiveSource>(
            sc.model, burst_schedule(sc.label, a.bursts, a.burst_s, a.gap_s), profile.pipeline.sample_rate_hz);
    }

    std::unique_ptr<Clock> clock;
    if (a.fast)
        clock = std::make_unique<VirtualClock>();
    else
        clock = std::make_unique<SteadyClock>();

    std::unique_ptr<CommandActuator> actuator;
    if (!profile.daemon.actuator_command.empty())
        actuator = std::make_unique<CommandActuator>(profile.daemon.actuator_command);

    std::ofstream log_file;
    if (!a.log.empty())
        log_file = open_out(a.log);
    std::ostream &log_out = a.log.empty() ? std::cout : log_file;
    EventLog log;
    log.set_listener([&](const LogRecord &r) { log_out << format_record(r) << '\n' << std::flush; });

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    LiveOptions opts;
    opts.max_probes = a.max_probes;
    opts.duration_s = a.duration_s;
    opts.stop = &g_stop;

    const LiveSummary s = run_live(profile, profile_basis(profile), *source, *clock, actuator.get(), log, opts);
    if (actuator)
        actuator->drain();
    fmt::print(stderr, "probes = {}\nframes = {}\nstalls = {}\nmotion_events = {}\nactuations = {}\n"
                       "offered_load_kbps = {:.1f}\n",
               s.probes, s.frames, s.stalls, s.events.size(), s.actuations.size(), s.offered_load_bps / 1000.0);
    return 0;
}

int cmd_inspect(const std::string &path) {
    const CsiStream s = read_trace_file(path);
    const Geometry &g = s.geometry;
    fmt::print("format = CSITrace v1\n");
    fmt::print("bytes = {}\n", trace_size_bytes(s));
    fmt::print("sample_rate_hz = {:.3f}\n", s.sample_rate_hz);
    fmt::print("n_tx = {}\nn_rx = {}\nn_sub = {}\n", g.n_tx, g.n_rx, g.n_sub);
    fmt::print("frames = {}\n", s.frames.size());
    if (s.frames.empty())
        return 0;
    const double span_s = double(s.frames.back().timestamp_us - s.frames.front().timestamp_us) / 1e6;
    fmt::print("first_timestamp_us = {}\nlast_timestamp_us = {}\nduration_s = {:.3f}\n", s.frames.front().timestamp_us,
               s.frames.back().timestamp_us, span_s);
    const PacingReport pace = check_pacing(s);
    fmt::print("median_interval_us = {:.1f}\nexpected_interval_us = {:.1f}\npacing_ok = {}\n", pace.median_interval_us,
               pace.expected_interval_us, pace.within_tolerance);

    const Matrix amp = csi_amplitude_streams(s);
    double lo = amp.minCoeff(), hi = amp.maxCoeff(), mean = amp.mean();
    const double sd = std::sqrt((amp.array() - mean).square().sum() / double(amp.size()));
    fmt::print("amplitude_mean = {:.6g}\namplitude_std = {:.6g}\namplitude_min = {:.6g}\namplitude_max = {:.6g}\n",
               mean, sd, lo, hi);
    return 0;
}

int cmd_refit(const std::string &trace_path, const std::string &config, const std::string &out) {
    const Profile profile = load_profile(config);
    const PcaBasis basis = fit_warmup_basis(read_trace_file(trace_path), profile.pipeline, profile.detector);
    const std::string path = out.empty() ? fs::path(config).replace_extension(".basis").string() : out;
    write_basis_file(basis, path);
    set_config_key(config, "pca_basis", fs::absolute(path).string());
    fmt::print(stderr, "basis written to {}\n", path);
    return 0;
}

int cmd_init(const std::string &path, bool force) {
    if (fs::exists(path) && !force)
        throw ConfigError(fmt::format("{} exists; pass --force to overwrite", path));
    auto out = open_out(path);
    write_profile(Profile{}, out);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"vsbutton: WiFi CSI presence gate for voice assistants"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto *c_synth = app.add_subcommand("synth", "Generate a labelled synthetic CSI trace");
    c_synth->add_option("scenario", synth.scenario, "Preset name")
        ->required()
        ->check(CLI::IsMember({"no-motion", "indoor-wave", "indoor-sit", "indoor-jump", "outdoor-wave", "outdoor-sit",
                               "outdoor-jump"}));
    c_synth->add_option("--duration", synth.duration_s, "Seconds of motion after the lead-in")->capture_default_str();
    c_synth->add_option("--seed", synth.seed, "Override the preset seed");
    c_synth->add_option("--out", synth.out, "Output .csit path")->required();
    c_synth->add_option("--bursts", synth.bursts, "Emit this many motion bursts separated by gaps");
    c_synth->add_option("--burst-s", synth.burst_s)->capture_default_str();
    c_synth->add_option("--gap-s", synth.gap_s)->capture_default_str();
    c_synth->add_option("--lead-in", synth.lead_in_s)->capture_default_str();
    c_synth->add_option("--rate", synth.rate_hz, "Sample rate in Hz")->capture_default_str();

    CalibrateArgs cal;
    auto *c_cal = app.add_subcommand("calibrate", "Derive threshold_t from indoor and outdoor sessions");
    c_cal->add_option("--indoor", cal.indoor, "Traces with indoor sessions")->required()->check(CLI::ExistingFile);
    c_cal->add_option("--outdoor", cal.outdoor, "Traces with outdoor sessions")->required()->check(CLI::ExistingFile);
    c_cal->add_option("--config", cal.config, "Profile to update")->required()->check(CLI::ExistingFile);
    c_cal->add_option("--report", cal.report, "Report path (default stdout)");
    c_cal->add_option("--basis-out", cal.basis_out, "Basis path (default <config>.basis)");
    c_cal->add_option("--baseline", cal.baseline, "Motion-free trace to fit the PCA basis on")
        ->check(CLI::ExistingFile);

    ReplayArgs rep;
    auto *c_rep = app.add_subcommand("replay", "Run the detector over a recorded trace");
    c_rep->add_option("--trace", rep.trace)->required()->check(CLI::ExistingFile);
    c_rep->add_option("--labels", rep.labels, "Label sidecar (default next to the trace)");
    c_rep->add_option("--config", rep.config)->required()->check(CLI::ExistingFile);
    c_rep->add_option("--log", rep.log, "Event log path (default stdout)");
    c_rep->add_option("--summary", rep.summary, "Summary path");

    RunArgs run;
    auto *c_run = app.add_subcommand("run", "Run the gate daemon against a live source");
    c_run->add_option("--config", run.config)->required()->check(CLI::ExistingFile);
    c_run->add_option("--source", run.source)->check(CLI::IsMember({"replay-loop", "synthetic"}))->capture_default_str();
    c_run->add_option("--actuator", run.actuator, "Command template; {transition} becomes ENABLE or DISABLE");
    c_run->add_option("--trace", run.trace, "Trace for --source replay-loop")->check(CLI::ExistingFile);
    c_run->add_option("--scenario", run.scenario, "Preset for --source synthetic")->capture_default_str();
    c_run->add_option("--bursts", run.bursts)->capture_default_str();
    c_run->add_option("--burst-s", run.burst_s)->capture_default_str();
    c_run->add_option("--gap-s", run.gap_s)->capture_default_str();
    c_run->add_option("--duration", run.duration_s, "Stop after this many seconds");
    c_run->add_option("--max-probes", run.max_probes, "Stop after this many probes");
    c_run->add_flag("--fast", run.fast, "Virtual clock: do not sleep between probes");
    c_run->add_option("--log", run.log, "Event log path (default stdout)");

    std::string inspect_trace;
    auto *c_ins = app.add_subcommand("inspect", "Print trace header and amplitude statistics");
    c_ins->add_option("--trace", inspect_trace)->required()->check(CLI::ExistingFile);

    std::string refit_trace, refit_config, refit_out;
    auto *c_refit = app.add_subcommand("refit", "Refit the PCA basis on a trace's warm-up window");
    c_refit->add_option("--trace", refit_trace)->required()->check(CLI::ExistingFile);
    c_refit->add_option("--config", refit_config)->required()->check(CLI::ExistingFile);
    c_refit->add_option("--out", refit_out);

    std::string init_path;
    bool init_force = false;
    auto *c_init = app.add_subcommand("init-config", "Write a profile with default values");
    c_init->add_option("path", init_path)->required();
    c_init->add_flag("--force", init_force);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_synth)
            return cmd_synth(synth);
        if (*c_cal)
            return cmd_calibrate(cal);
        if (*c_rep)
            return cmd_replay(rep);
        if (*c_run)
            return cmd_run(run);
        if (*c_ins)
            return cmd_inspect(inspect_trace);
        if (*c_refit)
            return cmd_refit(refit_trace, refit_config, refit_out);
        if (*c_init)
            return cmd_init(init_path, init_force);
    } catch (const vsbutton::Error &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
