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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mess/curves.hpp"
#include "mess/devices.hpp"
#include "mess/frontend.hpp"

namespace mess {

/// Feedback-controller parameters.
struct ControllerConfig {
    uint32_t window_ops = 1000;   // memory operations per control window
    double conv_factor = 0.5;     // update gain, in (0, 1]
    double cpu_latency_ns = 0.0;  // on-core latency subtracted before the core sees it
    double clamp_fraction = 0.999; // cap on the bandwidth estimate vs. curve top
    std::optional<double> initial_latency_ns; // default: unloaded latency

    void validate() const;
};

/// One closed control window.
struct WindowRecord {
    uint64_t window_index = 0;
    double cpu_bw_gbps = 0.0;  // bandwidth the core actually generated
    double mess_bw_gbps = 0.0; // controller estimate after the update
    int read_ratio_pct = 100;
    double latency_ns = 0.0; // load-to-use latency for the next window
    bool saturated = false;
    uint64_t reads = 0; // window op counts (not serialized)
    uint64_t writes = 0;
};

/// The analytical memory model: per window of `window_ops` memory
/// operations it compares the bandwidth the core generated against its own
/// estimate, moves the estimate by conv_factor of the difference, and reads
/// the next window's latency off the curve family at the new position.
class Controller {
public:
    Controller(const CurveFamily& family, ControllerConfig config);

    /// Latency handed to the core for every request in the current window:
    /// max(latency - cpu_latency_ns, 1 ns).
    double memory_latency_ns() const;

    /// Load-to-use latency at the controller's current curve position.
    double latency_ns() const { return latency_ns_; }
    double mess_bw_gbps() const { return mess_bw_; }

    /// Counts one access; closes the window when it fills.
    void record_access(OpKind kind, uint64_t now_cycle, double cycle_time_ns);

    /// Applies the control update. Requires a non-empty window and
    /// now_cycle > window start (zero elapsed time raises SimulationError).
    WindowRecord close_window(uint64_t now_cycle, double cycle_time_ns);

    /// Closes a pending partial window at end of run; no-op when empty.
    void finish(uint64_t now_cycle, double cycle_time_ns);

    const std::vector<WindowRecord>& window_log() const { return log_; }

    /// Number of times the cpu-latency subtraction hit the 1 ns floor.
    uint64_t latency_floor_hits() const { return floor_hits_; }

    uint64_t window_reads() const { return window_reads_; }
    uint64_t window_writes() const { return window_writes_; }

private:
    const CurveFamily* family_;
    ControllerConfig config_;
    double mess_bw_ = 0.0;
    double latency_ns_;
    uint64_t window_reads_ = 0;
    uint64_t window_writes_ = 0;
    uint64_t window_start_cycle_ = 0;
    uint64_t window_index_ = 0;
    mutable uint64_t floor_hits_ = 0;
    std::vector<WindowRecord> log_;
};

/// The curve family exposed through the pluggable device contract. Every
/// request is answered with the current window's memory latency; the request
/// itself advances the window accounting.
class MessDevice final : public MemoryDevice {
public:
    MessDevice(const CurveFamily& family, ControllerConfig config, double cycle_time_ns)
        : controller_(family, config), cycle_time_ns_(cycle_time_ns) {}

    double latency_ns(const MemoryRequest& request) override {
        double lat = controller_.memory_latency_ns();
        controller_.record_access(request.kind, request.issue_cycle, cycle_time_ns_);
        return lat;
    }

    Controller& controller() { return controller_; }

private:
    Controller controller_;
    double cycle_time_ns_;
};

/// Steady state of a latency-limited request loop.
struct SteadyState {
    double bandwidth_gbps = 0.0;
    double latency_ns = 0.0;
};

/// Independent fixed-point oracle: solves
///   b = outstanding * line_size / (think + latency(b))
/// by bisection on [0, bandwidth_limit) to 1e-9 relative tolerance. The
/// latency function must be non-decreasing in bandwidth. Raises OracleError
/// when no root is bracketed.
SteadyState steady_state_oracle(const std::function<double(double)>& latency_of_bw_ns,
                                double bandwidth_limit_gbps, double think_ns,
                                uint32_t outstanding, int line_size_bytes);

enum class DeviceMode { mess, fixed, md1 };

struct RunSummary {
    uint64_t total_cycles = 0;
    uint64_t reads = 0;
    uint64_t writes = 0;
    double mean_latency_ns = 0.0;
    double p50_latency_ns = 0.0;
    double p95_latency_ns = 0.0;
    double p99_latency_ns = 0.0;
    double mean_bandwidth_gbps = 0.0;
    uint64_t window_count = 0;
    uint64_t latency_floor_hits = 0; // times the cpu-latency subtraction bottomed out
};

struct RunLog {
    std::vector<WindowRecord> windows;
    RunSummary summary;
};

/// Drives the trace-driven core against the selected memory model. In mess
/// mode every request in a window is served with that window's memory
/// latency and a trailing partial window is closed at end of run.
RunLog run_simulation(const CurveFamily& family, const ControllerConfig& controller_cfg,
                      const std::vector<TraceRecord>& trace, TraceStyle style,
                      const CoreConfig& core, DeviceMode mode, const DeviceConfig& device_cfg);

/// RunLog CSV: `window_index,cpu_bw_gbps,mess_bw_gbps,read_ratio_pct,latency_ns,saturated`.
void save_window_log(const std::vector<WindowRecord>& windows, std::ostream& out);
void save_summary_json(const RunSummary& summary, std::ostream& out);

} // namespace mess
