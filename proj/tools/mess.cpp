/*
 * Copyright 2026 Mess toolkit contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mess/curves.hpp"
#include "mess/devices.hpp"
#include "mess/fixtures.hpp"
#include "mess/frontend.hpp"
#include "mess/metrics.hpp"
#include "mess/profiler.hpp"
#include "mess/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitSimulationError = 3;

void print_warnings(const mess::CurveFamily& family) {
    for (const std::string& w : family.warnings) std::cerr << "warning: " << w << "\n";
}

// (0, 1] range check for gain-like flags; CLI11 turns the message into a
// parse error, which exits with the input-error code.
const CLI::Validator HalfOpenUnit{[](std::string& s) -> std::string {
                                      double v = 0.0;
                                      try {
                                          v = std::stod(s);
                                      } catch (...) {
                                          return "not a number";
                                      }
                                      if (!(v > 0.0) || v > 1.0) return "must be in (0, 1]";
                                      return {};
                                  },
                                  "FRACTION"};

// Inclusive sweep syntax: "lo:hi:step", "lo:hi" (step 1) or "a,b,c".
template <typename T>
std::vector<T> parse_sweep(const std::string& spec) {
    std::vector<T> out;
    if (spec.find(':') != std::string::npos) {
        long long lo = 0, hi = 0, step = 1;
        int n = std::sscanf(spec.c_str(), "%lld:%lld:%lld", &lo, &hi, &step);
        if (n < 2 || step <= 0 || hi < lo || lo < 0)
            throw mess::FormatError("bad sweep '" + spec + "', expected lo:hi:step");
        for (long long v = lo; v <= hi; v += step) out.push_back(static_cast<T>(v));
        return out;
    }
    size_t start = 0;
    while (start <= spec.size()) {
        size_t comma = spec.find(',', start);
        std::string tok = spec.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!tok.empty()) {
            long long v = std::stoll(tok);
            if (v < 0) throw mess::FormatError("sweep values must be non-negative: '" + spec + "'");
            out.push_back(static_cast<T>(v));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw mess::FormatError("empty sweep '" + spec + "'");
    return out;
}

nlohmann::ordered_json onset_json(const mess::FamilyMetrics& m) {
    nlohmann::ordered_json per_ratio;
    for (const auto& [ratio, onset] : m.saturation_onset_per_ratio)
        per_ratio[std::to_string(ratio)] = {{"bandwidth_gbps", onset.bandwidth_gbps},
                                            {"saturates", onset.saturates}};
    return per_ratio;
}

int cmd_metrics(const std::string& curves_path, double noise_epsilon,
                const std::string& json_path) {
    mess::CurveFamily family = mess::load_family(curves_path);
    print_warnings(family);
    mess::FamilyMetrics m = mess::compute_metrics(family, noise_epsilon);

    char buf[160];
    std::snprintf(buf, sizeof(buf), "platform                   %s", family.platform_name.c_str());
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "curves                     %zu", family.curves.size());
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "unloaded latency           %.1f ns", m.unloaded_latency_ns);
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "max latency range          %.1f - %.1f ns",
                  m.max_latency_range_ns.first, m.max_latency_range_ns.second);
    std::cout << buf << "\n";
    std::snprintf(buf, sizeof(buf), "saturated bandwidth range  %.1f - %.1f GB/s%s",
                  m.saturated_bandwidth_range_gbps.first, m.saturated_bandwidth_range_gbps.second,
                  m.any_curve_saturates ? "" : " (never saturates)");
    std::cout << buf << "\n";
    size_t wave_count = 0;
    for (const auto& [ratio, segs] : m.wave_segments_per_ratio) wave_count += segs.size();
    std::snprintf(buf, sizeof(buf), "wave segments              %zu", wave_count);
    std::cout << buf << "\n\n";

    nlohmann::ordered_json j;
    j["platform_name"] = family.platform_name;
    j["unloaded_latency_ns"] = m.unloaded_latency_ns;
    j["max_latency_range_ns"] = {m.max_latency_range_ns.first, m.max_latency_range_ns.second};
    j["saturated_bandwidth_range_gbps"] = {m.saturated_bandwidth_range_gbps.first,
                                           m.saturated_bandwidth_range_gbps.second};
    j["any_curve_saturates"] = m.any_curve_saturates;
    j["saturation_onset_per_ratio"] = onset_json(m);
    nlohmann::ordered_json waves;
    for (const auto& [ratio, segs] : m.wave_segments_per_ratio) {
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& [s, e] : segs) list.push_back({s, e});
        waves[std::to_string(ratio)] = list;
    }
    j["wave_segments_per_ratio"] = waves;
    std::cout << j.dump(2) << "\n";

    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw mess::FormatError("cannot write " + json_path);
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string curves_path;
    std::string trace_path;
    std::string format = "ramulator";
    std::string device = "mess";
    std::string out_prefix = "mess_run";
    mess::ControllerConfig controller;
    mess::CoreConfig core;
    mess::DeviceConfig device_cfg;
    double initial_latency = 0.0; // 0: start from the unloaded latency
};

int cmd_simulate(const SimulateArgs& args) {
    mess::TraceStyle style =
        args.format == "ramulator" ? mess::TraceStyle::ramulator : mess::TraceStyle::dramsim3;
    mess::DeviceMode mode = args.device == "mess"    ? mess::DeviceMode::mess
                            : args.device == "fixed" ? mess::DeviceMode::fixed
                                                     : mess::DeviceMode::md1;

    mess::ControllerConfig controller = args.controller;
    if (args.initial_latency > 0.0) controller.initial_latency_ns = args.initial_latency;
    controller.validate();

    mess::CurveFamily family;
    if (mode == mess::DeviceMode::mess) {
        family = mess::load_family(args.curves_path);
        print_warnings(family);
    }

    std::vector<mess::TraceRecord> trace = mess::parse_trace(args.trace_path, style);
    mess::RunLog log =
        mess::run_simulation(family, controller, trace, style, args.core, mode, args.device_cfg);

    std::string windows_path = args.out_prefix + ".windows.csv";
    std::string summary_path = args.out_prefix + ".summary.json";
    {
        std::ofstream out(windows_path, std::ios::binary);
        if (!out) throw mess::FormatError("cannot write " + windows_path);
        mess::save_window_log(log.windows, out);
    }
    {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw mess::FormatError("cannot write " + summary_path);
        mess::save_summary_json(log.summary, out);
    }
    mess::save_summary_json(log.summary, std::cout);
    if (log.summary.latency_floor_hits > 0)
        std::cerr << "warning: memory latency hit the 1 ns floor "
                  << log.summary.latency_floor_hits
                  << " times; --cpu-latency exceeds the curve latency there\n";
    std::cerr << "wrote " << windows_path << " and " << summary_path << "\n";
    return kExitOk;
}

struct CharacterizeArgs {
    std::string device = "md1";
    std::string curves_path;
    std::string out_path = "characterized.csv";
    std::string ratios = "50:100:10";
    std::string gaps = "0:2048:64";
    mess::DeviceConfig device_cfg;
    mess::ControllerConfig controller;
    mess::CoreConfig core;
    mess::CharacterizeConfig sweep;
};

int cmd_characterize(const CharacterizeArgs& args) {
    mess::CharacterizeConfig cfg = args.sweep;
    cfg.ratios = parse_sweep<int>(args.ratios);
    for (int r : cfg.ratios)
        if (r < 0 || r > 100) throw mess::FormatError("read ratios must be in [0, 100]");
    cfg.pressure_sweep_gaps = parse_sweep<uint64_t>(args.gaps);
    // Measurement order is increasing pressure: largest gap first.
    std::sort(cfg.pressure_sweep_gaps.begin(), cfg.pressure_sweep_gaps.end(),
              std::greater<uint64_t>());

    mess::CurveFamily input_family;
    mess::DeviceFactory factory;
    double cycle_time = args.core.cycle_time_ns();
    int line = args.core.line_size_bytes;
    if (args.device == "fixed") {
        factory = [&] { return std::make_unique<mess::FixedLatencyDevice>(args.device_cfg.fixed_latency_ns); };
        cfg.platform_name = "fixed-latency";
    } else if (args.device == "md1") {
        factory = [&] {
            return std::make_unique<mess::Md1Device>(args.device_cfg.service_bandwidth_gbps,
                                                     args.device_cfg.base_latency_ns, line, cycle_time);
        };
        cfg.platform_name = "md1-queue";
    } else if (args.device == "analytic") {
        factory = [&] {
            return std::make_unique<mess::AnalyticDevice>(args.device_cfg.l0_ns, args.device_cfg.k_ns,
                                                          args.device_cfg.bmax_gbps, line, cycle_time);
        };
        cfg.platform_name = "analytic";
    } else if (args.device == "mess") {
        if (args.curves_path.empty())
            throw mess::FormatError("--device mess needs --curves");
        input_family = mess::load_family(args.curves_path);
        print_warnings(input_family);
        mess::ControllerConfig controller = args.controller;
        controller.validate();
        factory = [&input_family, controller, cycle_time] {
            return std::make_unique<mess::MessDevice>(input_family, controller, cycle_time);
        };
        cfg.platform_name = input_family.platform_name + "-remeasured";
    } else {
        throw mess::FormatError("unknown device: " + args.device);
    }

    mess::CurveFamily measured = mess::characterize(factory, cfg, args.core);
    print_warnings(measured);
    if (measured.empty()) throw mess::SimulationError("characterization produced no points");
    mess::save_family(measured, args.out_path);
    std::cerr << "wrote " << args.out_path << " and "
              << mess::manifest_path_for(args.out_path).string() << "\n";
    return kExitOk;
}

int cmd_profile(const std::string& curves_path, const std::string& samples_path,
                double w_lat, double w_slope, const std::string& out_path) {
    if (w_lat < 0.0 || w_slope < 0.0 || std::abs(w_lat + w_slope - 1.0) > 1e-9)
        throw mess::FormatError("--w-lat and --w-slope must be non-negative and sum to 1");
    mess::CurveFamily family = mess::load_family(curves_path);
    print_warnings(family);
    if (mess::degenerate_for_scoring(family))
        std::cerr << "warning: family has no latency contrast; all stress scores are 0\n";
    std::vector<mess::ProfileSample> samples = mess::load_samples(samples_path);
    std::vector<mess::ProfilePoint> points =
        mess::profile(family, samples, {w_lat, w_slope});
    if (out_path == "-") {
        mess::save_profile(points, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw mess::FormatError("cannot write " + out_path);
        mess::save_profile(points, out);
        std::cerr << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

struct GenCurvesArgs {
    std::string model = "analytic";
    std::string platform = "skylake";
    std::string ratios = "50:100:10";
    std::string out_path = "curves.csv";
    int points = 30;
    double penalty = 0.3;
    mess::DeviceConfig device_cfg;
};

int cmd_gen_curves(const GenCurvesArgs& args) {
    mess::CurveFamily family;
    if (args.model == "analytic") {
        family = mess::make_analytic_family(args.device_cfg.l0_ns, args.device_cfg.k_ns,
                                            args.device_cfg.bmax_gbps, parse_sweep<int>(args.ratios),
                                            args.points, args.penalty);
    } else if (args.model == "table1") {
        family = mess::make_platform_family(args.platform);
    } else {
        throw mess::FormatError("unknown model: " + args.model);
    }
    mess::save_family(family, args.out_path);
    std::cerr << "wrote " << args.out_path << " and "
              << mess::manifest_path_for(args.out_path).string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Memory-system performance toolkit: bandwidth-latency curve families,\n"
                 "an analytical feedback-controller memory simulator, curve metrics and\n"
                 "application stress profiling"};
    app.require_subcommand(1);

    // metrics
    std::string m_curves, m_json;
    double m_epsilon = 0.0;
    CLI::App* metrics = app.add_subcommand("metrics", "Print family metrics as a table and JSON");
    metrics->add_option("curves", m_curves, "curve family CSV")->required();
    metrics->add_option("--noise-epsilon", m_epsilon, "relative tolerance for wave detection")
        ->check(CLI::NonNegativeNumber);
    metrics->add_option("--json", m_json, "also write the JSON to this file");

    // simulate
    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Trace-driven run against a memory model");
    simulate->add_option("--curves", sim.curves_path, "curve family CSV (mess device)");
    simulate->add_option("--trace", sim.trace_path, "input trace")->required();
    simulate->add_option("--format", sim.format, "trace style: ramulator | dramsim3")
        ->check(CLI::IsMember({"ramulator", "dramsim3"}));
    simulate->add_option("--device", sim.device, "memory model: mess | fixed | md1")
        ->check(CLI::IsMember({"mess", "fixed", "md1"}));
    simulate->add_option("--window", sim.controller.window_ops, "memory operations per control window (default 1000)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--conv-factor", sim.controller.conv_factor,
                         "controller gain in (0,1] (default 0.5)")
        ->check(HalfOpenUnit);
    simulate->add_option("--cpu-latency", sim.controller.cpu_latency_ns,
                         "on-core latency subtracted from the curve latency, ns (default 0)");
    simulate->add_option("--clamp-fraction", sim.controller.clamp_fraction,
                         "bandwidth-estimate cap as a fraction of the curve top (default 0.999)")
        ->check(HalfOpenUnit);
    simulate->add_option("--initial-latency", sim.initial_latency,
                         "starting latency, ns (default: unloaded latency)");
    simulate->add_option("--fixed-latency", sim.device_cfg.fixed_latency_ns,
                         "fixed device latency, ns (default 89)");
    simulate->add_option("--service-bw", sim.device_cfg.service_bandwidth_gbps,
                         "md1 service bandwidth, GB/s (default 128)");
    simulate->add_option("--base-latency,--base-lat", sim.device_cfg.base_latency_ns,
                         "md1 latency floor, ns (default 89)");
    simulate->add_option("--freq", sim.core.frequency_ghz, "core frequency, GHz (default 2.0)");
    simulate->add_option("--ipc", sim.core.ipc_nonmem, "non-memory IPC (default 1.0)");
    simulate->add_option("--mshr", sim.core.mshr_entries, "MSHR entries (default 10)");
    simulate->add_option("--line-size", sim.core.line_size_bytes, "cache line, bytes (default 64)");
    simulate->add_flag("--reads-blocking", sim.core.reads_blocking,
                       "reads stall retirement until completion");
    simulate->add_option("--out", sim.out_prefix,
                         "output prefix for <prefix>.windows.csv and <prefix>.summary.json");
    uint64_t sim_seed = 0;
    simulate->add_option("--seed", sim_seed,
                         "reserved; every component is deterministic, the value is ignored");

    // characterize
    CharacterizeArgs ch;
    CLI::App* characterize =
        app.add_subcommand("characterize", "Measure a device into a curve family");
    characterize->add_option("--device", ch.device, "fixed | md1 | analytic | mess")
        ->check(CLI::IsMember({"fixed", "md1", "analytic", "mess"}));
    characterize->add_option("--curves", ch.curves_path, "input family (mess device)");
    characterize->add_option("--ratios", ch.ratios, "read-ratio sweep, lo:hi:step in percent");
    characterize->add_option("--gaps", ch.gaps,
                             "pressure sweep of inter-request gaps in cycles, lo:hi:step "
                             "(swept largest gap first)");
    characterize->add_option("--streams", ch.sweep.streams, "generator streams (default 8)");
    characterize->add_option("--probe-ops", ch.sweep.probe_ops,
                             "latency-probe samples per point (default 1000)");
    characterize->add_option("--warmup-ops", ch.sweep.warmup_ops,
                             "generator accesses before sampling (default 30000)");
    characterize->add_option("--threads", ch.sweep.max_threads,
                             "sweep worker threads (default: cores, capped by MESS_THREADS)");
    characterize->add_option("--fixed-latency", ch.device_cfg.fixed_latency_ns,
                             "fixed device latency, ns (default 89)");
    characterize->add_option("--service-bw", ch.device_cfg.service_bandwidth_gbps,
                             "md1 service bandwidth, GB/s (default 128)");
    characterize->add_option("--base-latency,--base-lat", ch.device_cfg.base_latency_ns,
                             "md1 latency floor, ns (default 89)");
    characterize->add_option("--l0", ch.device_cfg.l0_ns, "analytic unloaded latency, ns (default 89)");
    characterize->add_option("--k", ch.device_cfg.k_ns, "analytic contention scale, ns (default 31.2)");
    characterize->add_option("--bmax", ch.device_cfg.bmax_gbps,
                             "analytic bandwidth pole, GB/s (default 128)");
    characterize->add_option("--window", ch.controller.window_ops,
                             "mess-device control window (default 1000)");
    characterize->add_option("--conv-factor", ch.controller.conv_factor,
                             "mess-device controller gain (default 0.5)")
        ->check(HalfOpenUnit);
    characterize->add_option("--freq", ch.core.frequency_ghz, "core frequency, GHz (default 2.0)");
    characterize->add_option("--mshr", ch.core.mshr_entries,
                             "MSHR entries per stream (default 10)");
    characterize->add_option("--line-size", ch.core.line_size_bytes, "cache line, bytes (default 64)");
    characterize->add_option("--out", ch.out_path, "output curve CSV (default characterized.csv)");
    uint64_t ch_seed = 0;
    characterize->add_option("--seed", ch_seed,
                             "reserved; every component is deterministic, the value is ignored");

    // profile
    std::string p_curves, p_samples, p_out = "-";
    double p_wlat = 0.5, p_wslope = 0.5;
    CLI::App* profile = app.add_subcommand("profile", "Score bandwidth samples on a curve family");
    profile->add_option("--curves", p_curves, "curve family CSV")->required();
    profile->add_option("--samples", p_samples, "sample CSV")->required();
    profile->add_option("--w-lat", p_wlat, "latency weight (default 0.5)");
    profile->add_option("--w-slope", p_wslope, "inclination weight (default 0.5)");
    profile->add_option("--out", p_out, "output CSV path, '-' for stdout");

    // gen-curves
    GenCurvesArgs gen;
    CLI::App* gen_curves = app.add_subcommand("gen-curves", "Emit a synthetic curve family");
    gen_curves->add_option("--model", gen.model, "analytic | table1")
        ->check(CLI::IsMember({"analytic", "table1"}));
    gen_curves->add_option("--platform", gen.platform, "table1 shape: skylake | cascadelake");
    gen_curves->add_option("--ratios", gen.ratios, "read-ratio sweep, lo:hi:step (analytic model)");
    gen_curves->add_option("--points", gen.points, "points per curve (default 30)")
        ->check(CLI::PositiveNumber);
    gen_curves->add_option("--l0", gen.device_cfg.l0_ns, "unloaded latency, ns (default 89)");
    gen_curves->add_option("--k", gen.device_cfg.k_ns, "contention scale, ns (default 31.2)");
    gen_curves->add_option("--bmax", gen.device_cfg.bmax_gbps, "bandwidth pole, GB/s (default 128)");
    gen_curves->add_option("--penalty", gen.penalty,
                           "latency penalty per write share (default 0.3)");
    gen_curves->add_option("--out", gen.out_path, "output curve CSV (default curves.csv)");

    try {
        app.parse(argc, argv);
        if (*metrics) return cmd_metrics(m_curves, m_epsilon, m_json);
        if (*simulate) return cmd_simulate(sim);
        if (*characterize) return cmd_characterize(ch);
        if (*profile) return cmd_profile(p_curves, p_samples, p_wlat, p_wslope, p_out);
        if (*gen_curves) return cmd_gen_curves(gen);
        return kExitInputError;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    } catch (const mess::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mess::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mess::EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mess::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const mess::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSimulationError;
    }
}
