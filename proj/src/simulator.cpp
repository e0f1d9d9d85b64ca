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

#include "mess/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace mess {

void ControllerConfig::validate() const {
    if (window_ops < 1) throw SimulationError("window_ops must be at least 1");
    if (!(conv_factor > 0.0) || conv_factor > 1.0)
        throw SimulationError("conv_factor must be in (0, 1]");
    if (cpu_latency_ns < 0.0) throw SimulationError("cpu_latency_ns must be non-negative");
    if (!(clamp_fraction > 0.0) || clamp_fraction > 1.0)
        throw SimulationError("clamp_fraction must be in (0, 1]");
    if (initial_latency_ns && !(*initial_latency_ns > 0.0))
        throw SimulationError("initial_latency_ns must be positive");
}

Controller::Controller(const CurveFamily& family, ControllerConfig config)
    : family_(&family), config_(config) {
    config_.validate();
    if (family.empty()) throw SimulationError("controller needs a non-empty curve family");
    // Start from the unloaded latency of the most-read curve unless the user
    // picked an explicit starting latency.
    latency_ns_ = config_.initial_latency_ns ? *config_.initial_latency_ns
                                             : family.lookup_latency(100.0, 0.0).latency_ns;
}

double Controller::memory_latency_ns() const {
    constexpr double kMinDeviceLatencyNs = 1.0;
    double lat = latency_ns_ - config_.cpu_latency_ns;
    if (lat < kMinDeviceLatencyNs) {
        ++floor_hits_;
        return kMinDeviceLatencyNs;
    }
    return lat;
}

void Controller::record_access(OpKind kind, uint64_t now_cycle, double cycle_time_ns) {
    if (kind == OpKind::read)
        ++window_reads_;
    else
        ++window_writes_;
    if (window_reads_ + window_writes_ == config_.window_ops) close_window(now_cycle, cycle_time_ns);
}

WindowRecord Controller::close_window(uint64_t now_cycle, double cycle_time_ns) {
    uint64_t ops = window_reads_ + window_writes_;
    assert(ops > 0);
    if (now_cycle <= window_start_cycle_)
        throw SimulationError("window closed with zero elapsed cycles");

    double elapsed_ns = (now_cycle - window_start_cycle_) * cycle_time_ns;
    // bytes per nanosecond == GB/s
    double cpu_bw = ops * static_cast<double>(family_->line_size_bytes) / elapsed_ns;
    int read_ratio =
        static_cast<int>(std::llround(100.0 * static_cast<double>(window_reads_) / ops));

    mess_bw_ += config_.conv_factor * (cpu_bw - mess_bw_);
    double cap = config_.clamp_fraction * family_->max_bandwidth(read_ratio);
    bool clamped = false;
    if (mess_bw_ > cap) {
        mess_bw_ = cap;
        clamped = true;
    }
    LatencyLookup look = family_->lookup_latency(read_ratio, mess_bw_);
    latency_ns_ = look.latency_ns;

    WindowRecord rec;
    rec.window_index = window_index_;
    rec.cpu_bw_gbps = cpu_bw;
    rec.mess_bw_gbps = mess_bw_;
    rec.read_ratio_pct = read_ratio;
    rec.latency_ns = latency_ns_;
    rec.saturated = clamped || look.saturated;
    rec.reads = window_reads_;
    rec.writes = window_writes_;
    log_.push_back(rec);

    window_reads_ = 0;
    window_writes_ = 0;
    window_start_cycle_ = now_cycle;
    ++window_index_;
    return rec;
}

void Controller::finish(uint64_t now_cycle, double cycle_time_ns) {
    if (window_reads_ + window_writes_ == 0) return;
    close_window(now_cycle, cycle_time_ns);
}

SteadyState steady_state_oracle(const std::function<double(double)>& latency_of_bw_ns,
                                double bandwidth_limit_gbps, double think_ns,
                                uint32_t outstanding, int line_size_bytes) {
    if (outstanding < 1) throw OracleError("outstanding must be at least 1");
    if (!(bandwidth_limit_gbps > 0.0)) throw OracleError("bandwidth limit must be positive");

    double demand_bytes = static_cast<double>(outstanding) * line_size_bytes;
    auto gap = [&](double b) {
        double lat = latency_of_bw_ns(b);
        if (!(think_ns + lat > 0.0)) throw OracleError("non-positive cycle time in fixed point");
        return demand_bytes / (think_ns + lat) - b;
    };

    double lo = 0.0;
    double hi = bandwidth_limit_gbps * (1.0 - 1e-12);
    if (gap(lo) < 0.0) throw OracleError("no fixed point: demand below zero at idle");
    if (gap(hi) > 0.0) throw OracleError("no fixed point below the bandwidth limit");

    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (gap(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-9 * std::max(1.0, hi)) break;
    }
    double b = 0.5 * (lo + hi);
    return {b, latency_of_bw_ns(b)};
}

namespace {

double percentile(std::vector<double> sorted, double p) {
    if (sorted.empty()) return 0.0;
    size_t rank = static_cast<size_t>(std::ceil(p * sorted.size()));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

} // namespace

RunLog run_simulation(const CurveFamily& family, const ControllerConfig& controller_cfg,
                      const std::vector<TraceRecord>& trace, TraceStyle style,
                      const CoreConfig& core, DeviceMode mode, const DeviceConfig& device_cfg) {
    RunLog result;
    if (trace.empty()) return result;

    std::unique_ptr<MemoryDevice> device;
    MessDevice* mess_device = nullptr;
    switch (mode) {
    case DeviceMode::mess: {
        auto dev = std::make_unique<MessDevice>(family, controller_cfg, core.cycle_time_ns());
        mess_device = dev.get();
        device = std::move(dev);
        break;
    }
    case DeviceMode::fixed:
        device = std::make_unique<FixedLatencyDevice>(device_cfg.fixed_latency_ns);
        break;
    case DeviceMode::md1:
        device = std::make_unique<Md1Device>(device_cfg.service_bandwidth_gbps,
                                             device_cfg.base_latency_ns, core.line_size_bytes,
                                             core.cycle_time_ns());
        break;
    }

    CoreRunStats stats = run_trace_core(trace, style, core, *device, false);
    if (mess_device) {
        mess_device->controller().finish(stats.total_cycles, core.cycle_time_ns());
        result.windows = mess_device->controller().window_log();
        result.summary.latency_floor_hits = mess_device->controller().latency_floor_hits();
    }

    std::vector<double> sorted = stats.latencies_ns;
    std::sort(sorted.begin(), sorted.end());
    result.summary.total_cycles = stats.total_cycles;
    result.summary.reads = stats.reads;
    result.summary.writes = stats.writes;
    result.summary.mean_latency_ns = stats.mean_latency_ns;
    result.summary.p50_latency_ns = percentile(sorted, 0.50);
    result.summary.p95_latency_ns = percentile(sorted, 0.95);
    result.summary.p99_latency_ns = percentile(sorted, 0.99);
    result.summary.mean_bandwidth_gbps = stats.achieved_bandwidth_gbps;
    result.summary.window_count = result.windows.size();
    return result;
}

void save_window_log(const std::vector<WindowRecord>& windows, std::ostream& out) {
    out << "window_index,cpu_bw_gbps,mess_bw_gbps,read_ratio_pct,latency_ns,saturated\n";
    for (const WindowRecord& w : windows)
        out << w.window_index << ',' << format_double(w.cpu_bw_gbps) << ','
            << format_double(w.mess_bw_gbps) << ',' << w.read_ratio_pct << ','
            << format_double(w.latency_ns) << ',' << (w.saturated ? 1 : 0) << '\n';
}

void save_summary_json(const RunSummary& summary, std::ostream& out) {
    nlohmann::ordered_json j;
    j["total_cycles"] = summary.total_cycles;
    j["reads"] = summary.reads;
    j["writes"] = summary.writes;
    j["mean_latency_ns"] = summary.mean_latency_ns;
    j["p50_latency_ns"] = summary.p50_latency_ns;
    j["p95_latency_ns"] = summary.p95_latency_ns;
    j["p99_latency_ns"] = summary.p99_latency_ns;
    j["mean_bandwidth_gbps"] = summary.mean_bandwidth_gbps;
    j["window_count"] = summary.window_count;
    j["latency_floor_hits"] = summary.latency_floor_hits;
    out << j.dump(2) << "\n";
}

} // namespace mess
